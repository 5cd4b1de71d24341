#pragma once

// Small descriptive statistics and normal-distribution helpers.

#include <span>

namespace mppstat::stats {

double normal_cdf(double x);
/// Quantile of the standard normal; p in (0, 1).
double normal_quantile(double p);

double mean(std::span<const double> x);
/// Unbiased sample variance (n - 1 denominator); NaN for n < 2.
double variance(std::span<const double> x);
double skewness(std::span<const double> x);
double excess_kurtosis(std::span<const double> x);

struct KsResult {
    double statistic;
    double p_value;
};

/// Kolmogorov-Smirnov distance between the sample and N(mu, sd²).
KsResult ks_normal(std::span<const double> x, double mu, double sd);

/// Asymptotic Kolmogorov tail P(K > sqrt(n) D), with Stephens' finite-n
/// correction sqrt(n) + 0.12 + 0.11 / sqrt(n).
double kolmogorov_p_value(double d, double n);

} // namespace mppstat::stats
