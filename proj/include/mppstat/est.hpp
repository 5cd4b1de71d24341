#pragma once

// Ratio estimators of the weighted second-order mean mark: single
// realization, conditional, kernel-smoothed, and the multi-realization
// combinations (equal, weighted, pair-count weighted, concatenation).

#include "mppstat/core.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace mppstat::est {

struct EstimateResult {
    double value;
    bool defined;
    std::int64_t pair_count_used = 0;
    std::vector<std::int64_t> per_realization_pairs;
    Band band;
    std::size_t exclusions = 0;
    std::map<std::string, double> meta;

    static EstimateResult undefined(const Band& band);
};

/// Numerator and denominator of one realization's ratio estimator.
/// weighted_f = Σ z1 f(y1, y2), weighted_one = Σ z1, pairs = number of
/// qualifying ordered pairs, all over pairs with t1 in the window.
struct PairSums {
    double weighted_f = 0.0;
    double weighted_one = 0.0;
    std::int64_t pairs = 0;

    bool defined() const noexcept { return weighted_one > 0.0; }
    double ratio() const noexcept { return weighted_f / weighted_one; }
};

PairSums pair_sums(const PointPattern& pattern, const Window& win, const Band& band, const MarkFunction& f);

/// Per-realization sums, evaluated in parallel, returned in input order.
/// `windows` holds either one window shared by all patterns or one per pattern.
std::vector<PairSums> pair_sums(std::span<const PointPattern> patterns, std::span<const Window> windows,
                                const Band& band, const MarkFunction& f, unsigned threads = 0);

EstimateResult mu_hat(const PointPattern& pattern, const Window& win, const Band& band, const MarkFunction& f);

/// α̂_{f·f_cond} / α̂_{f_cond}.
EstimateResult mu_hat_cond(const PointPattern& pattern, const Window& win, const Band& band, const MarkFunction& f,
                           const MarkFunction& f_cond);

enum class Kernel { rectangular, epanechnikov, gaussian };

Kernel parse_kernel(const std::string& name);

/// Nadaraya-Watson smoothing of z1 f(y1, y2) over dis(t2 - t1) around r.
/// The rectangular kernel is the closed band [r - h, r + h], so it reproduces
/// mu_hat exactly. The gaussian kernel uses every pair; its weights are
/// rescaled by the nearest pair so the ratio never underflows.
EstimateResult mu_hat_kernel(const PointPattern& pattern, const Window& win, double r, const MarkFunction& f,
                             Kernel kernel, double bandwidth);

// ------------------------------------------------------ multi-realization

/// Mean of per-realization estimates; undefined ones are excluded and counted.
EstimateResult combine_equal(std::span<const PairSums> sums, const Band& band);

/// Σ w_i μ̂_i / Σ w_i. Zero total weight, or positive weight on an undefined
/// realization, is an InputError.
EstimateResult combine_weighted(std::span<const PairSums> sums, std::span<const double> weights, const Band& band);

/// combine_weighted with w_i = unweighted pair count of realization i.
EstimateResult combine_alpha(std::span<const PairSums> sums, const Band& band);

EstimateResult mu_hat_n(std::span<const PointPattern> patterns, std::span<const Window> windows, const Band& band,
                        const MarkFunction& f);
EstimateResult mu_hat_weighted(std::span<const PointPattern> patterns, std::span<const Window> windows,
                               const Band& band, const MarkFunction& f, std::span<const double> weights);
EstimateResult mu_hat_alpha(std::span<const PointPattern> patterns, std::span<const Window> windows,
                            const Band& band, const MarkFunction& f);

/// Leave-one-realization-out jackknife standard error of combine_weighted
/// (equal weights when `weights` is empty). NaN with fewer than two usable
/// realizations.
double jackknife_se(std::span<const PairSums> sums, std::span<const double> weights);

struct Concatenation {
    PointPattern pattern;
    Window window;
};

/// d = 1 only. Lays the realizations end to end, separated by gaps wider than
/// the band's reach, and rescales z so that
///   mu_hat(result.pattern, result.window) == mu_hat_weighted(patterns, weights).
/// Points outside a realization's estimation window keep their marks as
/// neighbours but get z = 0 so they never act as the first point of a pair.
Concatenation concat_patterns(std::span<const PointPattern> patterns, std::span<const Window> windows,
                              const Band& band, std::span<const double> weights);

} // namespace mppstat::est
