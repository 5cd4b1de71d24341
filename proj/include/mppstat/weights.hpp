#pragma once

// Weight strategies for combining per-realization estimates, the conditional
// variance of mu_hat given the point locations, BLUE weights, and a
// conformance table for the consistency conditions on weights.

#include "mppstat/core.hpp"
#include "mppstat/sim.hpp"

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace mppstat::weights {

enum class WeightKind { equal, alpha_pairs, count_based, rf_conditional_variance, custom };

WeightKind parse_weight_kind(const std::string& name); // equal | alpha | count | rfvar | custom
std::string to_string(WeightKind kind);

struct WeightStrategy {
    using Custom = std::function<double(const PointPattern&, const Window&, const Band&)>;

    WeightKind kind = WeightKind::equal;
    sim::CovarianceModel cov{};  // rf_conditional_variance: covariance of f(Y) over distance
    double var_f = 1.0;          // must equal cov(0)
    Custom custom;

    static WeightStrategy equal();
    static WeightStrategy alpha_pairs();
    static WeightStrategy count_based();
    static WeightStrategy rf_conditional_variance(sim::CovarianceModel cov, double var_f);
    static WeightStrategy from_function(Custom fn);
};

/// One weight per realization:
///   equal                   1
///   alpha_pairs             ordered pairs in band / v_T
///   count_based             points in the window (inverse of v / N_i; the
///                           mark variance v is a common factor and cancels)
///   rf_conditional_variance 1 / rf_conditional_variance(...), 0 when undefined
std::vector<double> compute_weights(const WeightStrategy& strategy, std::span<const PointPattern> patterns,
                                    std::span<const Window> windows, const Band& band);

/// Var[mu_hat | locations] for marks from an independent field with
/// covariance `cov` and f depending on y1 only:
///   Σ_{t1} Σ_{s1} Cov(f(Y(t1)), f(Y(s1))) n(t1) n(s1) / (Σ_{t1} n(t1))²
/// with n(t) the number of band neighbours of t and t1, s1 in the window.
/// NaN when no point of the window has a neighbour.
double rf_conditional_variance(const PointPattern& pattern, const Window& win, const Band& band,
                               const sim::CovarianceModel& cov, double var_f);

/// Same, for an arbitrary covariance function vanishing beyond `range`.
double rf_conditional_variance(const PointPattern& pattern, const Window& win, const Band& band,
                               const std::function<double(double)>& cov, double range, double var_f);

/// Σ⁻¹1 / (1'Σ⁻¹1). Throws InputError if Σ is not symmetric positive definite,
/// naming the first leading minor that fails.
std::vector<double> blue_weights(const Eigen::MatrixXd& cov);

// ----------------------------------------------------- conformance harness

enum class ConditionStatus { holds, fails, not_applicable };

struct ConditionCheck {
    std::string condition; // positivity, bounded_variance, mean_bounded_below, independence_mean,
                           // independence_target, max_ratio_bounded
    ConditionStatus status;
    std::string reason;
};

struct ConformanceReport {
    WeightKind kind;
    std::string target; // "mu" or "mu_tilde"
    std::vector<ConditionCheck> checks;

    bool consistent() const;
};

/// Checks the sufficient conditions for consistency of the weighted
/// estimator analytically from the mixture's class structure. Each strategy
/// is written as w_i = W_i * w̃_i; the report states which target (mu or
/// mu_tilde) the strategy is meant for and whether every condition holds.
ConformanceReport conformance(WeightKind kind, const sim::MixtureSpec& spec);

} // namespace mppstat::weights
