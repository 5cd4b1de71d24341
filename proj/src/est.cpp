#include "mppstat/est.hpp"

#include "mppstat/error.hpp"
#include "mppstat/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mppstat::est {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const Window& window_for(std::span<const Window> windows, std::size_t i, std::size_t n) {
    if (windows.size() == 1) return windows[0];
    if (windows.size() != n) {
        throw InputError("expected one window or one per realization, got " + std::to_string(windows.size()) +
                         " for " + std::to_string(n) + " realizations");
    }
    return windows[i];
}

EstimateResult defined_result(double value, std::int64_t pairs, const Band& band) {
    EstimateResult r{value, true, pairs, {}, band, 0, {}};
    return r;
}

EstimateResult from_sums(const PairSums& s, const Band& band) {
    if (!s.defined()) {
        EstimateResult r = EstimateResult::undefined(band);
        r.pair_count_used = s.pairs;
        return r;
    }
    EstimateResult r = defined_result(s.ratio(), s.pairs, band);
    r.meta["numerator"] = s.weighted_f;
    r.meta["denominator"] = s.weighted_one;
    return r;
}

void fill_pairs(EstimateResult& r, std::span<const PairSums> sums) {
    r.per_realization_pairs.clear();
    r.pair_count_used = 0;
    for (const PairSums& s : sums) {
        r.per_realization_pairs.push_back(s.pairs);
        r.pair_count_used += s.pairs;
    }
}

void check_weights(std::span<const PairSums> sums, std::span<const double> weights) {
    if (weights.size() != sums.size()) {
        throw InputError("weights length " + std::to_string(weights.size()) + " does not match " +
                         std::to_string(sums.size()) + " realizations");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (!(weights[i] >= 0.0) || !std::isfinite(weights[i])) {
            throw InputError("weights must be finite and >= 0 (realization " + std::to_string(i) + ")");
        }
        if (weights[i] > 0.0 && !sums[i].defined()) {
            throw InputError("realization " + std::to_string(i) + " has an undefined estimate but positive weight");
        }
        total += weights[i];
    }
    if (!(total > 0.0)) throw InputError("weights sum to zero");
}

} // namespace

EstimateResult EstimateResult::undefined(const Band& band) { return {kNaN, false, 0, {}, band, 0, {}}; }

PairSums pair_sums(const PointPattern& pattern, const Window& win, const Band& band, const MarkFunction& f) {
    const auto pairs = enumerate_pairs(pattern, win, band);
    PairSums s;
    s.pairs = static_cast<std::int64_t>(pairs.size());
    s.weighted_f = weighted_pair_sum(pattern, pairs, f);
    for (const PointPair& p : pairs) s.weighted_one += pattern.z(p.first);
    return s;
}

std::vector<PairSums> pair_sums(std::span<const PointPattern> patterns, std::span<const Window> windows,
                                const Band& band, const MarkFunction& f, unsigned threads) {
    const std::size_t n = patterns.size();
    if (n > 0) (void)window_for(windows, 0, n);
    return parallel::map_indexed(
        n, [&](std::size_t i) { return pair_sums(patterns[i], window_for(windows, i, n), band, f); }, threads);
}

EstimateResult mu_hat(const PointPattern& pattern, const Window& win, const Band& band, const MarkFunction& f) {
    return from_sums(pair_sums(pattern, win, band, f), band);
}

EstimateResult mu_hat_cond(const PointPattern& pattern, const Window& win, const Band& band, const MarkFunction& f,
                           const MarkFunction& f_cond) {
    const auto pairs = enumerate_pairs(pattern, win, band);
    PairSums s;
    s.pairs = static_cast<std::int64_t>(pairs.size());
    s.weighted_f = weighted_pair_sum(pattern, pairs, multiply(f, f_cond));
    s.weighted_one = weighted_pair_sum(pattern, pairs, f_cond);
    return from_sums(s, band);
}

Kernel parse_kernel(const std::string& name) {
    if (name == "rectangular") return Kernel::rectangular;
    if (name == "epanechnikov") return Kernel::epanechnikov;
    if (name == "gaussian") return Kernel::gaussian;
    throw InputError("unknown kernel '" + name + "'");
}

EstimateResult mu_hat_kernel(const PointPattern& pattern, const Window& win, double r, const MarkFunction& f,
                             Kernel kernel, double bandwidth) {
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) throw InputError("kernel bandwidth must be finite and > 0");
    if (!std::isfinite(r)) throw InputError("kernel location r must be finite");
    const std::size_t d = pattern.dim();
    const bool is_signed = d == 1;

    if (kernel == Kernel::rectangular) {
        const Band band(is_signed ? r - bandwidth : std::max(0.0, r - bandwidth), r + bandwidth, is_signed);
        EstimateResult res = mu_hat(pattern, win, band, f);
        res.meta["bandwidth"] = bandwidth;
        return res;
    }

    double extent = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
        const double side = pattern.sim_window().hi[k] - pattern.sim_window().lo[k];
        extent += side * side;
    }
    extent = std::sqrt(extent) + 1.0;
    const Band band = kernel == Kernel::gaussian
                          ? Band(is_signed ? -extent : 0.0, extent, is_signed)
                          : Band(is_signed ? r - bandwidth : std::max(0.0, r - bandwidth), r + bandwidth, is_signed);
    const auto pairs = enumerate_pairs(pattern, win, band);

    double shift = 0.0;
    if (kernel == Kernel::gaussian && !pairs.empty()) {
        shift = std::numeric_limits<double>::infinity();
        for (const PointPair& p : pairs) shift = std::min(shift, (r - p.distance) * (r - p.distance));
    }
    auto weight = [&](double distance) {
        const double u = (r - distance) / bandwidth;
        if (kernel == Kernel::epanechnikov) return std::max(0.0, 1.0 - u * u);
        return std::exp(-((r - distance) * (r - distance) - shift) / (2.0 * bandwidth * bandwidth));
    };

    double positive = 0.0;
    double negative = 0.0;
    double denominator = 0.0;
    for (const PointPair& p : pairs) {
        const double v = f(pattern.y(p.first), pattern.y(p.second));
        if (!std::isfinite(v)) {
            throw NumericError("mark function '" + f.name() + "' is not finite on a pair", p.first, p.second);
        }
        const double k = pattern.z(p.first) * weight(p.distance);
        if (v >= 0.0) {
            positive += k * v;
        } else {
            negative += k * -v;
        }
        denominator += k;
    }
    EstimateResult res = from_sums({positive - negative, denominator, static_cast<std::int64_t>(pairs.size())},
                                   Band::for_dim(d, is_signed ? r : std::max(0.0, r), is_signed ? r : std::max(0.0, r)));
    res.meta["bandwidth"] = bandwidth;
    return res;
}

EstimateResult combine_equal(std::span<const PairSums> sums, const Band& band) {
    if (sums.empty()) throw InputError("need at least one realization");
    double total = 0.0;
    std::size_t used = 0;
    for (const PairSums& s : sums) {
        if (!s.defined()) continue;
        total += s.ratio();
        ++used;
    }
    EstimateResult r = used == 0 ? EstimateResult::undefined(band)
                                 : defined_result(total / static_cast<double>(used), 0, band);
    fill_pairs(r, sums);
    r.exclusions = sums.size() - used;
    return r;
}

EstimateResult combine_weighted(std::span<const PairSums> sums, std::span<const double> weights, const Band& band) {
    if (sums.empty()) throw InputError("need at least one realization");
    check_weights(sums, weights);
    double num = 0.0;
    double den = 0.0;
    std::size_t zero_weight = 0;
    for (std::size_t i = 0; i < sums.size(); ++i) {
        if (weights[i] == 0.0) {
            ++zero_weight;
            continue;
        }
        num += weights[i] * sums[i].ratio();
        den += weights[i];
    }
    EstimateResult r = defined_result(num / den, 0, band);
    fill_pairs(r, sums);
    r.meta["zero_weight_realizations"] = static_cast<double>(zero_weight);
    return r;
}

EstimateResult combine_alpha(std::span<const PairSums> sums, const Band& band) {
    if (sums.empty()) throw InputError("need at least one realization");
    std::vector<double> w;
    w.reserve(sums.size());
    for (const PairSums& s : sums) w.push_back(static_cast<double>(s.pairs));
    if (std::all_of(w.begin(), w.end(), [](double x) { return x == 0.0; })) {
        EstimateResult r = EstimateResult::undefined(band);
        fill_pairs(r, sums);
        r.exclusions = sums.size();
        return r;
    }
    return combine_weighted(sums, w, band);
}

EstimateResult mu_hat_n(std::span<const PointPattern> patterns, std::span<const Window> windows, const Band& band,
                        const MarkFunction& f) {
    if (patterns.empty()) throw InputError("mu_hat_n needs n >= 1 realizations");
    const auto sums = pair_sums(patterns, windows, band, f);
    return combine_equal(sums, band);
}

EstimateResult mu_hat_weighted(std::span<const PointPattern> patterns, std::span<const Window> windows,
                               const Band& band, const MarkFunction& f, std::span<const double> weights) {
    if (patterns.empty()) throw InputError("mu_hat_weighted needs n >= 1 realizations");
    if (weights.size() != patterns.size()) throw InputError("weights length does not match the number of patterns");
    const auto sums = pair_sums(patterns, windows, band, f);
    return combine_weighted(sums, weights, band);
}

EstimateResult mu_hat_alpha(std::span<const PointPattern> patterns, std::span<const Window> windows,
                            const Band& band, const MarkFunction& f) {
    if (patterns.empty()) throw InputError("mu_hat_alpha needs n >= 1 realizations");
    const auto sums = pair_sums(patterns, windows, band, f);
    std::vector<double> w(sums.size());
    bool any = false;
    for (std::size_t i = 0; i < sums.size(); ++i) {
        w[i] = static_cast<double>(sums[i].pairs) / window_for(windows, i, sums.size()).volume();
        any = any || w[i] > 0.0;
    }
    if (!any) return combine_alpha(sums, band);
    return combine_weighted(sums, w, band);
}

double jackknife_se(std::span<const PairSums> sums, std::span<const double> weights) {
    std::vector<double> w(sums.size());
    for (std::size_t i = 0; i < sums.size(); ++i) {
        w[i] = weights.empty() ? (sums[i].defined() ? 1.0 : 0.0) : weights[i];
    }
    double num = 0.0;
    double den = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < sums.size(); ++i) {
        if (w[i] > 0.0 && sums[i].defined()) {
            num += w[i] * sums[i].ratio();
            den += w[i];
            ++used;
        }
    }
    if (used < 2) return kNaN;
    std::vector<double> loo;
    loo.reserve(used);
    for (std::size_t i = 0; i < sums.size(); ++i) {
        if (w[i] > 0.0 && sums[i].defined()) {
            loo.push_back((num - w[i] * sums[i].ratio()) / (den - w[i]));
        }
    }
    double mean = 0.0;
    for (double v : loo) mean += v;
    mean /= static_cast<double>(used);
    double ss = 0.0;
    for (double v : loo) ss += (v - mean) * (v - mean);
    return std::sqrt(ss * static_cast<double>(used - 1) / static_cast<double>(used));
}

Concatenation concat_patterns(std::span<const PointPattern> patterns, std::span<const Window> windows,
                              const Band& band, std::span<const double> weights) {
    const std::size_t n = patterns.size();
    if (n == 0) throw InputError("concat_patterns needs at least one pattern");
    if (weights.size() != n) throw InputError("weights length does not match the number of patterns");
    const MarkFunction one = builtin("const_one");
    std::vector<PairSums> sums(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (patterns[i].dim() != 1) throw InputError("concatenation is only defined for d = 1");
        sums[i] = pair_sums(patterns[i], window_for(windows, i, n), band, one);
    }
    check_weights(sums, weights);
    double total = 0.0;
    for (double w : weights) total += w;

    const double gap = band.reach() + 1.0;
    if (!(gap > 0.0)) throw InternalError("concatenation gap must be positive");

    std::vector<double> coords;
    std::vector<double> y;
    std::vector<double> z;
    double cursor = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const PointPattern& p = patterns[i];
        const Window& win = window_for(windows, i, n);
        const double lo = p.sim_window().lo[0];
        const double scale = weights[i] > 0.0 ? (weights[i] / total) / sums[i].weighted_one : 0.0;
        for (std::size_t k = 0; k < p.size(); ++k) {
            coords.push_back(p.location(k)[0] - lo + cursor);
            y.push_back(p.y(k));
            z.push_back(win.contains(p.location(k)) ? p.z(k) * scale : 0.0);
        }
        cursor += p.sim_window().hi[0] - lo;
        if (i + 1 < n) cursor += gap;
    }
    const double length = std::max(cursor, std::numeric_limits<double>::min());
    return {PointPattern(1, Box{{0.0}, {length}}, std::move(coords), std::move(y), std::move(z)),
            Window(std::vector<double>{length})};
}

} // namespace mppstat::est
