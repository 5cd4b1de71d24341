#include "mppstat/stats.hpp"

#include "mppstat/error.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace mppstat::stats {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw InputError("normal quantile needs p in (0, 1)");
    return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

double mean(std::span<const double> x) {
    if (x.empty()) return std::numeric_limits<double>::quiet_NaN();
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

namespace {

double central_moment(std::span<const double> x, double m, int k) {
    double s = 0.0;
    for (double v : x) s += std::pow(v - m, k);
    return s / static_cast<double>(x.size());
}

} // namespace

double variance(std::span<const double> x) {
    if (x.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    // Shifted by x[0] so that identical values give exactly 0.
    double m = 0.0;
    for (double v : x) m += v - x[0];
    m /= static_cast<double>(x.size());
    double s = 0.0;
    for (double v : x) s += (v - x[0] - m) * (v - x[0] - m);
    return s / static_cast<double>(x.size() - 1);
}

double skewness(std::span<const double> x) {
    if (x.size() < 3) return std::numeric_limits<double>::quiet_NaN();
    const double m = mean(x);
    const double m2 = central_moment(x, m, 2);
    return central_moment(x, m, 3) / std::pow(m2, 1.5);
}

double excess_kurtosis(std::span<const double> x) {
    if (x.size() < 4) return std::numeric_limits<double>::quiet_NaN();
    const double m = mean(x);
    const double m2 = central_moment(x, m, 2);
    return central_moment(x, m, 4) / (m2 * m2) - 3.0;
}

double kolmogorov_p_value(double d, double n) {
    const double sn = std::sqrt(n);
    const double lambda = (sn + 0.12 + 0.11 / sn) * d;
    if (lambda < 1e-3) return 1.0;
    double sum = 0.0;
    for (int j = 1; j <= 200; ++j) {
        const double term = std::exp(-2.0 * j * j * lambda * lambda);
        sum += (j % 2 == 1 ? 2.0 : -2.0) * term;
        if (term < 1e-16) break;
    }
    return std::clamp(sum, 0.0, 1.0);
}

KsResult ks_normal(std::span<const double> x, double mu, double sd) {
    if (x.empty()) throw InputError("KS test needs a non-empty sample");
    if (!(sd > 0.0)) throw InputError("KS test needs sd > 0");
    std::vector<double> s(x.begin(), x.end());
    std::sort(s.begin(), s.end());
    const double n = static_cast<double>(s.size());
    double d = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double f = normal_cdf((s[i] - mu) / sd);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return {d, kolmogorov_p_value(d, n)};
}

} // namespace mppstat::stats
