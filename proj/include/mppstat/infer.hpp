#pragma once

// Normal-approximation inference for thresholded mean marks on the line,
// plus a running-window convergence curve.
//
// All sums here ignore z: the random field model behind the CLT carries unit
// weights. Only d = 1 patterns are accepted.

#include "mppstat/core.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace mppstat::infer {

struct CltConfig {
    Band band;
    MarkFunction base_f; // first-only
    double u = 0.0;      // threshold, u >= 0
};

/// How α̂* is centred: a known value (simulation studies) or the estimate
/// itself (data mode).
struct Centering {
    enum class Kind { oracle, plug_in };
    Kind kind = Kind::plug_in;
    double value = 0.0;

    static Centering oracle(double v) { return {Kind::oracle, v}; }
    static Centering plug_in() { return {Kind::plug_in, 0.0}; }
};

/// Σ over qualifying ordered pairs of (f_u(y1) - center) * 1{f(y1) > u}.
double alpha_star(const PointPattern& pattern, const Window& win, const Band& band, const MarkFunction& base_f,
                  double u, double center);

struct CltResult {
    bool defined = false;
    double centered_stat = 0.0; // α̂* / sqrt(α̂_cond)
    double alpha_star = 0.0;
    double cond_count = 0.0;    // α̂_cond: qualifying pairs with f(y1) > u
    double lambda_u_hat = 0.0;  // cond_count / T
    double mu_point = 0.0;      // α̂_{f_u} / α̂_cond
    double center = 0.0;
    double s_hat = 0.0;         // filled by attach_interval
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double level = 0.0;
};

/// One realization. With plug-in centering the centre is this realization's
/// own mu_point, so α̂* vanishes identically; use clt_statistics for a
/// plug-in centre shared across realizations.
CltResult clt_statistic(const PointPattern& pattern, const Window& win, const CltConfig& cfg,
                        const Centering& centering);

/// Many realizations, computed in parallel. Plug-in centering uses the pooled
/// ratio Σ α̂_{f_u} / Σ α̂_cond over all realizations.
std::vector<CltResult> clt_statistics(std::span<const PointPattern> patterns, std::span<const Window> windows,
                                      const CltConfig& cfg, const Centering& centering, unsigned threads = 0);

struct SEstimate {
    double s_hat;
    double lambda_u_hat; // mean of α̂_cond / T over realizations
    std::size_t n_used;
};

/// Sample variance of α̂* over realizations divided by λ̂_u T. Needs at least
/// 30 realizations. Windows must all have the same length.
SEstimate estimate_s(std::span<const PointPattern> patterns, std::span<const Window> windows, const CltConfig& cfg,
                     const Centering& centering, unsigned threads = 0);
SEstimate estimate_s(std::span<const CltResult> stats, double T);

struct Interval {
    double lo;
    double hi;
};

/// mu ± z_{(1+level)/2} sqrt(s / (λ T)).
Interval confidence_interval(double mu_point, double s_hat, double lambda_u_hat, double T, double level);

/// Fills s_hat, level and the interval of a per-realization result.
void attach_interval(CltResult& r, double s_hat, double T, double level);

struct CurvePoint {
    double T;
    double value;
    bool defined;
    std::int64_t pairs;
};

/// mu_hat on the nested windows [0, T_k]. Window sizes must increase.
std::vector<CurvePoint> convergence_diagnostic(const PointPattern& pattern, const Band& band, const MarkFunction& f,
                                               std::span<const double> window_sizes);

/// Nominal exceedance level 1 - 1/log T of the threshold schedule (T > e).
double schedule_level(double T);

/// u_T = mark_quantile(1 - 1/log T).
double threshold_schedule(double T, const std::function<double(double)>& mark_quantile);

struct RandomFieldDiagnostics {
    double min_distance; // d0 realised by the pattern (inf with < 2 points)
    double range;        // h0 of the mark covariance
    double d0_over_h0;
    double h0_over_d0;
    bool separated;      // d0 > h0: marks of distinct points are uncorrelated
};

RandomFieldDiagnostics condition_diagnostics(const PointPattern& pattern, double covariance_range);

} // namespace mppstat::infer
