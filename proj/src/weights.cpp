#include "mppstat/weights.hpp"

#include "mppstat/error.hpp"
#include "mppstat/log.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mppstat::weights {

namespace {

const Window& window_for(std::span<const Window> windows, std::size_t i, std::size_t n) {
    if (windows.size() == 1) return windows[0];
    if (windows.size() != n) throw InputError("expected one window or one per realization");
    return windows[i];
}

bool same_distribution(const sim::MarkDistribution& a, const sim::MarkDistribution& b) {
    if (a.index() != b.index()) return false;
    if (auto* x = std::get_if<sim::NormalMarks>(&a)) {
        auto& y = std::get<sim::NormalMarks>(b);
        return x->mean == y.mean && x->sd == y.sd;
    }
    if (auto* x = std::get_if<sim::UniformMarks>(&a)) {
        auto& y = std::get<sim::UniformMarks>(b);
        return x->a == y.a && x->b == y.b;
    }
    return std::get<sim::ConstantMarks>(a).c == std::get<sim::ConstantMarks>(b).c;
}

bool same_marks(const sim::MarkSpec& a, const sim::MarkSpec& b) {
    if (a.index() != b.index()) return false;
    if (auto* x = std::get_if<sim::IidMarks>(&a)) return same_distribution(x->dist, std::get<sim::IidMarks>(b).dist);
    const auto& x = std::get<sim::GaussianFieldMarks>(a);
    const auto& y = std::get<sim::GaussianFieldMarks>(b);
    return x.mean == y.mean && x.cov.shape == y.cov.shape && x.cov.variance == y.cov.variance &&
           x.cov.range == y.cov.range;
}

bool same_z(const sim::ZRule& a, const sim::ZRule& b) {
    if (a.index() != b.index()) return false;
    if (auto* x = std::get_if<sim::ConstantZ>(&a)) return x->value == std::get<sim::ConstantZ>(b).value;
    if (auto* x = std::get_if<sim::UniformZ>(&a)) {
        auto& y = std::get<sim::UniformZ>(b);
        return x->a == y.a && x->b == y.b;
    }
    return true;
}

bool same_ground(const sim::GroundSpec& a, const sim::GroundSpec& b) {
    if (a.index() != b.index()) return false;
    if (auto* x = std::get_if<sim::PoissonGround>(&a)) return x->intensity == std::get<sim::PoissonGround>(b).intensity;
    if (auto* x = std::get_if<sim::HardcoreGround>(&a)) {
        auto& y = std::get<sim::HardcoreGround>(b);
        return x->proposal_intensity == y.proposal_intensity && x->min_dist == y.min_dist;
    }
    const auto& x = std::get<sim::GridGround>(a);
    const auto& y = std::get<sim::GridGround>(b);
    return x.spacing == y.spacing && x.jitter == y.jitter;
}

template <class Pred>
bool all_classes(const sim::MixtureSpec& spec, Pred pred) {
    for (const auto& c : spec.classes) {
        if (!pred(spec.classes.front(), c)) return false;
    }
    return true;
}

} // namespace

WeightKind parse_weight_kind(const std::string& name) {
    if (name == "equal") return WeightKind::equal;
    if (name == "alpha" || name == "alpha_pairs") return WeightKind::alpha_pairs;
    if (name == "count" || name == "count_based") return WeightKind::count_based;
    if (name == "rfvar" || name == "rf_conditional_variance") return WeightKind::rf_conditional_variance;
    if (name == "custom") return WeightKind::custom;
    throw InputError("unknown weight strategy '" + name + "' (expected equal|alpha|count|rfvar)");
}

std::string to_string(WeightKind kind) {
    switch (kind) {
    case WeightKind::equal: return "equal";
    case WeightKind::alpha_pairs: return "alpha";
    case WeightKind::count_based: return "count";
    case WeightKind::rf_conditional_variance: return "rfvar";
    case WeightKind::custom: return "custom";
    }
    return "?";
}

WeightStrategy WeightStrategy::equal() { return {}; }

WeightStrategy WeightStrategy::alpha_pairs() {
    WeightStrategy s;
    s.kind = WeightKind::alpha_pairs;
    return s;
}

WeightStrategy WeightStrategy::count_based() {
    WeightStrategy s;
    s.kind = WeightKind::count_based;
    return s;
}

WeightStrategy WeightStrategy::rf_conditional_variance(sim::CovarianceModel cov, double var_f) {
    WeightStrategy s;
    s.kind = WeightKind::rf_conditional_variance;
    s.cov = cov;
    s.var_f = var_f;
    return s;
}

WeightStrategy WeightStrategy::from_function(Custom fn) {
    WeightStrategy s;
    s.kind = WeightKind::custom;
    s.custom = std::move(fn);
    return s;
}

std::vector<double> compute_weights(const WeightStrategy& strategy, std::span<const PointPattern> patterns,
                                    std::span<const Window> windows, const Band& band) {
    const std::size_t n = patterns.size();
    if (n == 0) throw InputError("compute_weights needs n >= 1 realizations");
    std::vector<double> w(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        const Window& win = window_for(windows, i, n);
        switch (strategy.kind) {
        case WeightKind::equal:
            break;
        case WeightKind::alpha_pairs:
            w[i] = static_cast<double>(pair_count(patterns[i], win, band)) / win.volume();
            break;
        case WeightKind::count_based:
            w[i] = static_cast<double>(patterns[i].count_in(win));
            break;
        case WeightKind::rf_conditional_variance: {
            if (!(strategy.var_f > 0.0)) throw InputError("rfvar weights need var_f > 0");
            const double v = rf_conditional_variance(patterns[i], win, band, strategy.cov, strategy.var_f);
            if (std::isnan(v) || !(v > 0.0)) {
                warn("rfvar weight: realization " + std::to_string(i) + " has no qualifying pairs; weight set to 0");
                w[i] = 0.0;
            } else {
                w[i] = 1.0 / v;
            }
            break;
        }
        case WeightKind::custom:
            if (!strategy.custom) throw InputError("custom weight strategy has no function");
            w[i] = strategy.custom(patterns[i], win, band);
            if (!(w[i] >= 0.0) || !std::isfinite(w[i])) {
                throw InputError("custom weight for realization " + std::to_string(i) + " is negative or not finite");
            }
            break;
        }
    }
    return w;
}

double rf_conditional_variance(const PointPattern& pattern, const Window& win, const Band& band,
                               const sim::CovarianceModel& cov, double var_f) {
    return rf_conditional_variance(pattern, win, band, [&cov](double h) { return cov(h); }, cov.range, var_f);
}

double rf_conditional_variance(const PointPattern& pattern, const Window& win, const Band& band,
                               const std::function<double(double)>& cov, double range, double var_f) {
    if (std::abs(cov(0.0) - var_f) > 1e-12 * std::max(1.0, std::abs(var_f))) {
        throw InputError("covariance at distance 0 must equal var_f");
    }
    if (!(range >= 0.0) || !std::isfinite(range)) throw InputError("covariance range must be finite");

    const auto pairs = enumerate_pairs(pattern, win, band);
    std::vector<std::uint32_t> who;
    std::vector<double> count;
    for (const PointPair& p : pairs) {
        if (who.empty() || who.back() != p.first) {
            who.push_back(p.first);
            count.push_back(0.0);
        }
        count.back() += 1.0;
    }
    const double total = std::accumulate(count.begin(), count.end(), 0.0);
    if (total == 0.0) return std::numeric_limits<double>::quiet_NaN();

    std::vector<std::size_t> order(who.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return pattern.location(who[a])[0] < pattern.location(who[b])[0];
    });
    double num = 0.0;
    for (std::size_t a = 0; a < order.size(); ++a) {
        const std::size_t i = order[a];
        num += var_f * count[i] * count[i];
        for (std::size_t b = a + 1; b < order.size(); ++b) {
            const std::size_t j = order[b];
            if (pattern.location(who[j])[0] - pattern.location(who[i])[0] > range) break;
            const double h = std::abs(dis(pattern.location(who[i]), pattern.location(who[j])));
            if (h <= range) num += 2.0 * cov(h) * count[i] * count[j];
        }
    }
    return num / (total * total);
}

std::vector<double> blue_weights(const Eigen::MatrixXd& cov) {
    const Eigen::Index n = cov.rows();
    if (n == 0 || cov.cols() != n) throw InputError("covariance matrix must be square and non-empty");
    if (!cov.allFinite()) throw InputError("covariance matrix has non-finite entries");
    const double scale = cov.cwiseAbs().maxCoeff();
    if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw InputError("covariance matrix is not symmetric");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
        for (Eigen::Index k = 1; k <= n; ++k) {
            Eigen::LLT<Eigen::MatrixXd> minor(cov.topLeftCorner(k, k));
            if (minor.info() != Eigen::Success) {
                throw InputError("covariance matrix is not positive definite: leading minor of order " +
                                 std::to_string(k) + " fails");
            }
        }
        throw InputError("covariance matrix is not positive definite");
    }
    const Eigen::VectorXd raw = llt.solve(Eigen::VectorXd::Ones(n));
    const double total = raw.sum();
    std::vector<double> w(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] = raw[i] / total;
    return w;
}

bool ConformanceReport::consistent() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const ConditionCheck& c) { return c.status != ConditionStatus::fails; });
}

ConformanceReport conformance(WeightKind kind, const sim::MixtureSpec& spec) {
    spec.validate();
    using S = ConditionStatus;
    ConformanceReport r{kind, kind == WeightKind::alpha_pairs ? "mu" : "mu_tilde", {}};
    auto add = [&](std::string name, S status, std::string reason) {
        r.checks.push_back({std::move(name), status, std::move(reason)});
    };

    if (kind == WeightKind::custom) {
        for (const char* c : {"positivity", "bounded_variance", "mean_bounded_below", "independence_mean",
                              "independence_target", "max_ratio_bounded"}) {
            add(c, S::not_applicable, "user-supplied weights are not analysed");
        }
        return r;
    }

    const bool all_grid = all_classes(spec, [](const auto&, const auto& c) {
        return std::holds_alternative<sim::GridGround>(c.ground);
    });
    const bool same_laws = all_classes(spec, [](const auto& a, const auto& c) {
        return same_marks(a.marks, c.marks) && same_z(a.z, c.z);
    });
    const bool same_grounds = all_classes(spec, [](const auto& a, const auto& c) { return same_ground(a.ground, c.ground); });
    const bool same_intensity = all_classes(spec, [&](const auto& a, const auto& c) {
        return sim::ground_intensity(a.ground, spec.dim) == sim::ground_intensity(c.ground, spec.dim);
    });

    switch (kind) {
    case WeightKind::equal:
        add("positivity", S::holds, "W_i = 1");
        add("bounded_variance", S::holds, "w~_i = 1 is constant");
        add("mean_bounded_below", S::holds, "E w~_i = 1");
        add("independence_mean", S::holds, "W_i is deterministic");
        add("independence_target", S::holds, "W_i is deterministic");
        add("max_ratio_bounded", S::holds, "ratio is identically 1");
        break;
    case WeightKind::alpha_pairs:
        add("positivity", S::holds, "W_i = 1");
        add("bounded_variance", S::holds,
            "pair counts of Poisson, grid and hardcore grounds have finite second moments on bounded windows");
        add("mean_bounded_below", S::holds,
            "E w~_i = sum_k p_k alpha_k(C(I)) > 0 whenever some class has pairs in the band");
        add("independence_mean", S::holds, "W_i is deterministic");
        add("independence_target", S::holds, "W_i is deterministic");
        add("max_ratio_bounded", S::holds, "w~_i is the pair count itself, so the ratio is identically 1");
        break;
    case WeightKind::count_based:
    case WeightKind::rf_conditional_variance: {
        const bool count = kind == WeightKind::count_based;
        if (count) {
            add("positivity", S::holds,
                all_grid ? "grid grounds always place points in a window wider than the spacing"
                         : "N_i > 0 fails only with probability exp(-lambda v_T), which vanishes as T grows");
        } else {
            add("positivity", S::holds,
                "the conditional variance is finite and positive whenever the realization has a pair in the band");
        }
        add("bounded_variance", S::holds, "w~_i = 1 is constant");
        add("mean_bounded_below", S::holds, "E w~_i = 1");
        add("independence_mean", S::holds, "w~_i = 1, so E[W w~] = E[W] E[w~] trivially");
        const bool independent = same_laws || (count ? same_intensity : same_grounds);
        add("independence_target", independent ? S::holds : S::fails,
            same_laws ? "all classes share one mark law, so the class mean mark is constant"
            : independent
                ? (count ? "all classes share one intensity, so E[W_i | class] is constant"
                         : "all classes share one ground law, so W_i is independent of the class")
                : (count ? "class intensity and class mark law both vary; W_i = N_i correlates with the class mean"
                         : "class ground law and mark law both vary; W_i depends on the class through the ground"));
        add("max_ratio_bounded", S::holds, "w~_i = 1, so the ratio is identically 1");
        break;
    }
    case WeightKind::custom:
        break;
    }
    return r;
}

} // namespace mppstat::weights
