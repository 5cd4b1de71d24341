#include "mppstat/oracle.hpp"

#include "mppstat/error.hpp"
#include "mppstat/est.hpp"
#include "mppstat/parallel.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace mppstat::oracle {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kTol = 1e-13;

using Fn1 = std::function<double(double)>;

double integrate(const Fn1& g, double a, double b) {
    if (a == b) return 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, a, b, 15, kTol);
}

/// ∫_a^b split at the given interior breakpoints.
double integrate_split(const Fn1& g, double a, double b, std::vector<double> cuts) {
    cuts.push_back(a);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    double s = 0.0;
    for (std::size_t i = 1; i < cuts.size(); ++i) {
        const double lo = std::max(a, cuts[i - 1]);
        const double hi = std::min(b, cuts[i]);
        if (hi > lo) s += integrate(g, lo, hi);
    }
    return s;
}

double phi(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }

/// E g(Y) for one mark, with the integration split at `cuts` (mark scale).
double expect(const sim::MarkDistribution& dist, const Fn1& g, const std::vector<double>& cuts = {}) {
    return std::visit(overloaded{
                          [&](const sim::NormalMarks& n) {
                              if (n.sd == 0.0) return g(n.mean);
                              const double inf = std::numeric_limits<double>::infinity();
                              std::vector<double> x;
                              for (double c : cuts) x.push_back((c - n.mean) / n.sd);
                              return integrate_split([&](double t) { return g(n.mean + n.sd * t) * phi(t); }, -inf,
                                                     inf, x);
                          },
                          [&](const sim::UniformMarks& u) {
                              if (u.a == u.b) return g(u.a);
                              return integrate_split(g, u.a, u.b, cuts) / (u.b - u.a);
                          },
                          [&](const sim::ConstantMarks& c) { return g(c.c); },
                      },
                      dist);
}

/// Points where 1{f(y) > u} changes value, located by a scan over the bulk
/// of the distribution and refined by bisection.
std::vector<double> level_crossings(const sim::MarkDistribution& dist, const MarkFunction& f, double u) {
    double lo = 0.0;
    double hi = 0.0;
    if (const auto* n = std::get_if<sim::NormalMarks>(&dist)) {
        lo = n->mean - 12.0 * n->sd;
        hi = n->mean + 12.0 * n->sd;
    } else if (const auto* un = std::get_if<sim::UniformMarks>(&dist)) {
        lo = un->a;
        hi = un->b;
    } else {
        return {};
    }
    const auto above = [&](double y) { return f(y, 0.0) > u; };
    constexpr int kSteps = 4096;
    std::vector<double> out;
    double prev_y = lo;
    bool prev = above(lo);
    for (int i = 1; i <= kSteps; ++i) {
        const double y = lo + (hi - lo) * i / kSteps;
        const bool cur = above(y);
        if (cur != prev) {
            double a = prev_y;
            double b = y;
            for (int k = 0; k < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++k) {
                const double m = 0.5 * (a + b);
                (above(m) == prev ? a : b) = m;
            }
            out.push_back(0.5 * (a + b));
        }
        prev = cur;
        prev_y = y;
    }
    return out;
}

/// E f(Y1, Y2) for a bivariate normal pair with common mean, variance and
/// correlation rho.
double expect_bivariate_normal(double mean, double variance, double rho, const MarkFunction& f) {
    const double sd = std::sqrt(variance);
    const sim::MarkDistribution std_normal = sim::NormalMarks{0.0, 1.0};
    if (std::abs(rho) >= 1.0) {
        return expect(std_normal, [&](double x) { return f(mean + sd * x, mean + sd * rho * x); });
    }
    const double s = std::sqrt(1.0 - rho * rho);
    return expect(std_normal, [&](double x1) {
        return expect(std_normal, [&](double x2) { return f(mean + sd * x1, mean + sd * (rho * x1 + s * x2)); });
    });
}

double z_mean(const sim::ZRule& z) {
    return std::visit(overloaded{
                          [](const sim::UnitZ&) { return 1.0; },
                          [](const sim::ConstantZ& c) { return c.value; },
                          [](const sim::UniformZ& u) { return 0.5 * (u.a + u.b); },
                      },
                      z);
}

bool constant_in_r(const sim::MixtureClass& cls, const MarkFunction& f) {
    return f.first_only() || std::holds_alternative<sim::IidMarks>(cls.marks);
}

double first_order_mean(const sim::MarkSpec& marks, const MarkFunction& f) {
    if (!f.first_only()) throw InputError("first-order mean marks need f depending on y1 only");
    return expect(marginal(marks), [&](double y) { return f(y, 0.0); });
}

/// CDF of U1 - U2 for U1, U2 uniform on [-j, j].
double triangular_cdf(double x, double j) {
    const double w = 2.0 * j;
    if (x <= -w) return 0.0;
    if (x >= w) return 1.0;
    if (x < 0.0) return (x + w) * (x + w) / (2.0 * w * w);
    return 1.0 - (w - x) * (w - x) / (2.0 * w * w);
}

/// Lattice offsets k != 0 whose jittered separation can land in [lo, hi].
std::vector<long> lattice_range(const sim::GridGround& g, double lo, double hi) {
    const double w = 2.0 * g.jitter;
    const long k0 = static_cast<long>(std::floor((lo - w) / g.spacing)) - 1;
    const long k1 = static_cast<long>(std::ceil((hi + w) / g.spacing)) + 1;
    std::vector<long> ks;
    for (long k = k0; k <= k1; ++k) {
        if (k != 0) ks.push_back(k);
    }
    return ks;
}

void require_grid_line(const sim::GridGround&, std::size_t dim) {
    if (dim != 1) throw UnsupportedSpecError("grid pair intensities are only available in d = 1");
}

void require_band_dim(const Band& band, std::size_t dim) {
    if (band.is_signed() != (dim == 1)) throw InputError("band signedness does not match the dimension");
}

double pair_intensity(const sim::GroundSpec& ground, std::size_t dim, const Band& band) {
    require_band_dim(band, dim);
    return std::visit(
        overloaded{
            [&](const sim::PoissonGround& p) {
                const double l2 = p.intensity * p.intensity;
                if (dim == 1) return l2 * (band.hi() - band.lo());
                const double d = static_cast<double>(dim);
                return l2 * sim::unit_ball_volume(dim) * (std::pow(band.hi(), d) - std::pow(band.lo(), d));
            },
            [&](const sim::HardcoreGround&) -> double {
                throw UnsupportedSpecError("hardcore grounds have no closed-form pair intensity; use brute_force_mu");
            },
            [&](const sim::GridGround& g) {
                require_grid_line(g, dim);
                double s = 0.0;
                for (long k : lattice_range(g, band.lo(), band.hi())) {
                    const double c = static_cast<double>(k) * g.spacing;
                    if (g.jitter == 0.0) {
                        s += band.contains(c) ? 1.0 : 0.0;
                    } else {
                        s += triangular_cdf(band.hi() - c, g.jitter) - triangular_cdf(band.lo() - c, g.jitter);
                    }
                }
                return s / g.spacing;
            },
        },
        ground);
}

/// ∫_I μ(r) dα(r) and ∫_I dα(r) by quadrature (atoms summed directly).
std::pair<double, double> band_integrals(const sim::MixtureClass& cls, std::size_t dim, const MarkFunction& f,
                                         const Band& band) {
    require_band_dim(band, dim);
    const auto mu = [&](double r) { return pointwise_mark_mean(cls, f, r); };
    if (const auto* g = std::get_if<sim::GridGround>(&cls.ground); g && g->jitter == 0.0) {
        require_grid_line(*g, dim);
        double num = 0.0;
        double den = 0.0;
        for (long k : lattice_range(*g, band.lo(), band.hi())) {
            const double c = static_cast<double>(k) * g->spacing;
            if (band.contains(c)) {
                num += mu(c) / g->spacing;
                den += 1.0 / g->spacing;
            }
        }
        return {num, den};
    }
    std::vector<double> cuts{0.0};
    if (const auto* field = std::get_if<sim::GaussianFieldMarks>(&cls.marks)) {
        cuts.push_back(field->cov.range);
        cuts.push_back(-field->cov.range);
    }
    if (const auto* g = std::get_if<sim::GridGround>(&cls.ground)) {
        for (long k : lattice_range(*g, band.lo(), band.hi())) {
            const double c = static_cast<double>(k) * g->spacing;
            cuts.insert(cuts.end(), {c - 2.0 * g->jitter, c, c + 2.0 * g->jitter});
        }
    }
    const auto density = [&](double r) { return pair_density(cls.ground, dim, r); };
    const double num = integrate_split([&](double r) { return mu(r) * density(r); }, band.lo(), band.hi(), cuts);
    const double den = integrate_split(density, band.lo(), band.hi(), cuts);
    return {num, den};
}

double class_mark_mean(const sim::MixtureClass& cls, std::size_t dim, const MarkFunction& f, Order order,
                       const std::optional<Band>& band) {
    if (order == Order::first) return first_order_mean(cls.marks, f);
    if (!band) throw InputError("second-order mean marks need a band");
    require_band_dim(*band, dim);
    if (constant_in_r(cls, f)) return pointwise_mark_mean(cls, f, 0.5 * (band->lo() + band->hi()));
    const auto [num, den] = band_integrals(cls, dim, f, *band);
    return den > 0.0 ? num / den : kNaN;
}

} // namespace

sim::MarkDistribution marginal(const sim::MarkSpec& marks) {
    if (const auto* iid = std::get_if<sim::IidMarks>(&marks)) return iid->dist;
    const auto& field = std::get<sim::GaussianFieldMarks>(marks);
    return sim::NormalMarks{field.mean, std::sqrt(field.cov.variance)};
}

double pointwise_mark_mean(const sim::MixtureClass& cls, const MarkFunction& f, double r) {
    if (f.first_only()) return first_order_mean(cls.marks, f);
    if (const auto* iid = std::get_if<sim::IidMarks>(&cls.marks)) {
        return expect(iid->dist, [&](double y1) { return expect(iid->dist, [&](double y2) { return f(y1, y2); }); });
    }
    const auto& field = std::get<sim::GaussianFieldMarks>(cls.marks);
    const double rho = field.cov.variance > 0.0 ? field.cov(r) / field.cov.variance : 0.0;
    return expect_bivariate_normal(field.mean, field.cov.variance, rho, f);
}

double pair_density(const sim::GroundSpec& ground, std::size_t dim, double r) {
    return std::visit(
        overloaded{
            [&](const sim::PoissonGround& p) {
                const double l2 = p.intensity * p.intensity;
                if (dim == 1) return l2;
                const double d = static_cast<double>(dim);
                return l2 * d * sim::unit_ball_volume(dim) * std::pow(std::abs(r), d - 1.0);
            },
            [&](const sim::HardcoreGround&) -> double {
                throw UnsupportedSpecError("hardcore grounds have no closed-form pair density");
            },
            [&](const sim::GridGround& g) {
                require_grid_line(g, dim);
                if (g.jitter == 0.0) throw InputError("an unjittered grid has no pair density (atoms only)");
                const double w = 2.0 * g.jitter;
                double s = 0.0;
                for (long k : lattice_range(g, r, r)) {
                    const double x = r - static_cast<double>(k) * g.spacing;
                    s += std::max(0.0, w - std::abs(x)) / (w * w);
                }
                return s / g.spacing;
            },
        },
        ground);
}

ClassMoments class_moments(const sim::MixtureClass& cls, std::size_t dim, const MarkFunction& f, Order order,
                           const std::optional<Band>& band) {
    ClassMoments m;
    m.intensity = sim::ground_intensity(cls.ground, dim);
    m.z_mean = z_mean(cls.z);
    if (order == Order::first) {
        m.pair_intensity = kNaN;
    } else {
        if (!band) throw InputError("second-order mean marks need a band");
        m.pair_intensity = pair_intensity(cls.ground, dim, *band);
    }
    m.mark_mean_f = class_mark_mean(cls, dim, f, order, band);
    return m;
}

double closed_form_mu(const sim::MixtureSpec& spec, const MarkFunction& f, Order order,
                      const std::optional<Band>& band) {
    spec.validate();
    double num = 0.0;
    double den = 0.0;
    for (const auto& cls : spec.classes) {
        const ClassMoments m = class_moments(cls, spec.dim, f, order, band);
        const double a = (order == Order::first ? m.intensity : m.pair_intensity) * m.z_mean * cls.p;
        if (a == 0.0) continue;
        num += a * m.mark_mean_f;
        den += a;
    }
    if (!(den > 0.0)) throw InputError("no class contributes points or pairs; the mean mark is undefined");
    return num / den;
}

double closed_form_mu_tilde(const sim::MixtureSpec& spec, const MarkFunction& f, Order order,
                            const std::optional<Band>& band) {
    spec.validate();
    double s = 0.0;
    for (const auto& cls : spec.classes) {
        const double m = class_mark_mean(cls, spec.dim, f, order, band);
        if (std::isnan(m)) throw InputError("a class has no pairs in the band; its mean mark is undefined");
        s += cls.p * m;
    }
    return s;
}

double smoothed_mu_tilde(const sim::MixtureSpec& spec, const MarkFunction& f, const Band& band) {
    spec.validate();
    double s = 0.0;
    for (const auto& cls : spec.classes) {
        const auto [num, den] = band_integrals(cls, spec.dim, f, band);
        if (!(den > 0.0)) throw InputError("a class has no pairs in the band; its mean mark is undefined");
        s += cls.p * num / den;
    }
    return s;
}

BruteForceResult brute_force_mu(const sim::MixtureSpec& spec, const MarkFunction& f, Order order,
                                const std::optional<Band>& band, const BruteForceOptions& options) {
    spec.validate();
    if (options.n_mc < 1000) throw InputError("brute_force_mu needs n_mc >= 1000");
    if (order == Order::second && !band) throw InputError("second-order mean marks need a band");
    if (order == Order::first && !f.first_only()) throw InputError("first-order mean marks need f depending on y1 only");
    const Window win = Window::cube(spec.dim, options.T);
    const Box box = order == Order::second ? buffered_window(win, std::span<const Band>(&*band, 1)) : win.box();

    const auto sums = parallel::map_indexed(
        options.n_mc,
        [&](std::size_t i) {
            const auto real = sim::sample_realization(spec, box, sim::derive_seed(options.seed, i));
            if (order == Order::second) return est::pair_sums(real.pattern, win, *band, f);
            est::PairSums s;
            const PointPattern& p = real.pattern;
            for (std::size_t k = 0; k < p.size(); ++k) {
                if (!win.contains(p.location(k))) continue;
                s.weighted_f += p.z(k) * f(p.y(k), 0.0);
                s.weighted_one += p.z(k);
                ++s.pairs;
            }
            return s;
        },
        options.threads);

    std::vector<double> weights;
    if (options.mode == BruteForceOptions::Mode::pooled) {
        weights.reserve(sums.size());
        for (const auto& s : sums) weights.push_back(s.defined() ? s.weighted_one : 0.0);
    }
    double num = 0.0;
    double den = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < sums.size(); ++i) {
        if (!sums[i].defined()) continue;
        const double w = weights.empty() ? 1.0 : weights[i];
        num += w * sums[i].ratio();
        den += w;
        ++used;
    }
    if (used == 0) throw InputError("no simulated realization had a defined estimate");
    return {num / den, est::jackknife_se(sums, weights), used};
}

double exceedance_probability(const sim::MarkDistribution& dist, const MarkFunction& f, double u) {
    if (!f.first_only()) throw InputError("threshold functions need f depending on y1 only");
    return expect(dist, [&](double y) { return f(y, 0.0) > u ? 1.0 : 0.0; }, level_crossings(dist, f, u));
}

double conditional_excess_mean(const sim::MarkDistribution& dist, const MarkFunction& f, double u) {
    const double p = exceedance_probability(dist, f, u);
    if (!(p > 0.0)) throw InputError("threshold is never exceeded");
    return expect(dist, [&](double y) { return std::max(f(y, 0.0) - u, 0.0); }, level_crossings(dist, f, u)) / p;
}

} // namespace mppstat::oracle
