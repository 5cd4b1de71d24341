#include "mppstat/infer.hpp"

#include "mppstat/error.hpp"
#include "mppstat/est.hpp"
#include "mppstat/parallel.hpp"
#include "mppstat/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mppstat::infer {

namespace {

void require_line(const PointPattern& pattern) {
    if (pattern.dim() != 1) throw InputError("CLT inference supports d = 1 patterns only");
}

void require_config(const CltConfig& cfg) {
    if (!cfg.base_f.first_only()) throw InputError("CLT base function must depend on y1 only");
    if (!(cfg.u >= 0.0) || !std::isfinite(cfg.u)) throw InputError("threshold u must be finite and >= 0");
}

/// Per first point with at least one band neighbour: excess, indicator and
/// neighbour count.
struct FirstPoints {
    std::vector<double> excess;
    std::vector<double> above;
    std::vector<double> n;

    double excess_sum() const {
        double s = 0.0;
        for (std::size_t i = 0; i < n.size(); ++i) s += excess[i] * n[i];
        return s;
    }
    double cond_count() const {
        double s = 0.0;
        for (std::size_t i = 0; i < n.size(); ++i) s += above[i] * n[i];
        return s;
    }
    double centered(double center) const {
        double s = 0.0;
        for (std::size_t i = 0; i < n.size(); ++i) s += (excess[i] - center) * above[i] * n[i];
        return s;
    }
};

FirstPoints first_points(const PointPattern& pattern, const Window& win, const Band& band, const MarkFunction& base_f,
                         double u) {
    const auto pairs = enumerate_pairs(pattern, win, band);
    FirstPoints fp;
    std::uint32_t last = std::numeric_limits<std::uint32_t>::max();
    for (const PointPair& p : pairs) {
        if (p.first != last) {
            last = p.first;
            const double fy = base_f(pattern.y(p.first), 0.0);
            if (!std::isfinite(fy)) throw NumericError("mark function is not finite", p.first, p.second);
            fp.excess.push_back(std::max(fy - u, 0.0));
            fp.above.push_back(fy > u ? 1.0 : 0.0);
            fp.n.push_back(0.0);
        }
        fp.n.back() += 1.0;
    }
    return fp;
}

CltResult finish(const FirstPoints& fp, const Window& win, double center) {
    CltResult r;
    r.cond_count = fp.cond_count();
    r.lambda_u_hat = r.cond_count / win.volume();
    r.center = center;
    if (r.cond_count > 0.0) {
        r.defined = true;
        r.mu_point = fp.excess_sum() / r.cond_count;
        r.alpha_star = fp.centered(center);
        r.centered_stat = r.alpha_star / std::sqrt(r.cond_count);
    }
    return r;
}

const Window& window_for(std::span<const Window> windows, std::size_t i, std::size_t n) {
    if (windows.size() == 1) return windows[0];
    if (windows.size() != n) throw InputError("expected one window or one per realization");
    return windows[i];
}

} // namespace

double alpha_star(const PointPattern& pattern, const Window& win, const Band& band, const MarkFunction& base_f,
                  double u, double center) {
    require_line(pattern);
    require_config({band, base_f, u});
    return first_points(pattern, win, band, base_f, u).centered(center);
}

CltResult clt_statistic(const PointPattern& pattern, const Window& win, const CltConfig& cfg,
                        const Centering& centering) {
    require_line(pattern);
    require_config(cfg);
    const FirstPoints fp = first_points(pattern, win, cfg.band, cfg.base_f, cfg.u);
    double center = centering.value;
    if (centering.kind == Centering::Kind::plug_in) {
        const double c = fp.cond_count();
        center = c > 0.0 ? fp.excess_sum() / c : 0.0;
    }
    return finish(fp, win, center);
}

std::vector<CltResult> clt_statistics(std::span<const PointPattern> patterns, std::span<const Window> windows,
                                      const CltConfig& cfg, const Centering& centering, unsigned threads) {
    require_config(cfg);
    const std::size_t n = patterns.size();
    auto fps = parallel::map_indexed(
        n,
        [&](std::size_t i) {
            require_line(patterns[i]);
            return first_points(patterns[i], window_for(windows, i, n), cfg.band, cfg.base_f, cfg.u);
        },
        threads);
    double center = centering.value;
    if (centering.kind == Centering::Kind::plug_in) {
        double num = 0.0;
        double den = 0.0;
        for (const auto& fp : fps) {
            num += fp.excess_sum();
            den += fp.cond_count();
        }
        center = den > 0.0 ? num / den : 0.0;
    }
    std::vector<CltResult> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(finish(fps[i], window_for(windows, i, n), center));
    return out;
}

SEstimate estimate_s(std::span<const CltResult> stats, double T) {
    if (stats.size() < 30) throw InputError("estimating s needs at least 30 realizations");
    if (!(T > 0.0)) throw InputError("window length must be positive");
    std::vector<double> a;
    a.reserve(stats.size());
    double lambda = 0.0;
    for (const auto& r : stats) {
        a.push_back(r.alpha_star);
        lambda += r.cond_count / T;
    }
    lambda /= static_cast<double>(stats.size());
    if (!(lambda > 0.0)) throw InputError("no realization has a pair above the threshold");
    const double v = stats::variance(a);
    return {std::max(v, 0.0) / (lambda * T), lambda, stats.size()};
}

SEstimate estimate_s(std::span<const PointPattern> patterns, std::span<const Window> windows, const CltConfig& cfg,
                     const Centering& centering, unsigned threads) {
    if (patterns.size() < 30) throw InputError("estimating s needs at least 30 realizations");
    const double T = window_for(windows, 0, patterns.size()).volume();
    for (std::size_t i = 1; i < windows.size(); ++i) {
        if (windows[i].volume() != T) throw InputError("estimate_s needs windows of equal length");
    }
    const auto stats = clt_statistics(patterns, windows, cfg, centering, threads);
    return estimate_s(stats, T);
}

Interval confidence_interval(double mu_point, double s_hat, double lambda_u_hat, double T, double level) {
    if (!(level > 0.0 && level < 1.0)) throw InputError("confidence level must lie in (0, 1)");
    if (!(s_hat >= 0.0)) throw InputError("variance estimate must be >= 0");
    if (!(lambda_u_hat > 0.0)) throw InputError("lambda_u must be positive");
    if (!(T > 0.0)) throw InputError("window length must be positive");
    const double z = stats::normal_quantile(0.5 * (1.0 + level));
    const double half = z * std::sqrt(s_hat / (lambda_u_hat * T));
    return {mu_point - half, mu_point + half};
}

void attach_interval(CltResult& r, double s_hat, double T, double level) {
    const Interval ci = confidence_interval(r.mu_point, s_hat, r.lambda_u_hat, T, level);
    r.s_hat = s_hat;
    r.level = level;
    r.ci_lo = ci.lo;
    r.ci_hi = ci.hi;
}

std::vector<CurvePoint> convergence_diagnostic(const PointPattern& pattern, const Band& band, const MarkFunction& f,
                                               std::span<const double> window_sizes) {
    for (std::size_t k = 0; k < window_sizes.size(); ++k) {
        if (!(window_sizes[k] > 0.0) || (k > 0 && !(window_sizes[k] > window_sizes[k - 1]))) {
            throw InputError("window sizes must be positive and increasing");
        }
    }
    std::vector<CurvePoint> out;
    out.reserve(window_sizes.size());
    for (double T : window_sizes) {
        const Window win = Window::cube(pattern.dim(), T);
        const est::PairSums s = est::pair_sums(pattern, win, band, f);
        out.push_back({T, s.defined() ? s.ratio() : std::numeric_limits<double>::quiet_NaN(), s.defined(), s.pairs});
    }
    return out;
}

double schedule_level(double T) {
    if (!(T > std::exp(1.0))) throw InputError("the threshold schedule needs T > e");
    return 1.0 - 1.0 / std::log(T);
}

double threshold_schedule(double T, const std::function<double(double)>& mark_quantile) {
    return std::max(0.0, mark_quantile(schedule_level(T)));
}

RandomFieldDiagnostics condition_diagnostics(const PointPattern& pattern, double covariance_range) {
    require_line(pattern);
    if (!(covariance_range >= 0.0)) throw InputError("covariance range must be >= 0");
    std::vector<double> t(pattern.coords());
    std::sort(t.begin(), t.end());
    double d0 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < t.size(); ++i) d0 = std::min(d0, t[i] - t[i - 1]);
    return {d0, covariance_range, d0 / covariance_range, covariance_range / d0, d0 > covariance_range};
}

} // namespace mppstat::infer
