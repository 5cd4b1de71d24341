#include "mppstat/sim.hpp"

#include "mppstat/error.hpp"
#include "mppstat/log.hpp"
#include "mppstat/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace mppstat::sim {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void sort_and_dedupe(Locations& locs) {
    const std::size_t d = locs.dim;
    const std::size_t n = locs.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto less = [&](std::size_t a, std::size_t b) {
        auto la = locs.at(a);
        auto lb = locs.at(b);
        return std::lexicographical_compare(la.begin(), la.end(), lb.begin(), lb.end());
    };
    std::sort(order.begin(), order.end(), less);
    std::vector<double> out;
    out.reserve(locs.coords.size());
    for (std::size_t k = 0; k < n; ++k) {
        auto cur = locs.at(order[k]);
        if (k > 0) {
            auto prev = locs.at(order[k - 1]);
            if (std::equal(cur.begin(), cur.end(), prev.begin())) continue;
        }
        out.insert(out.end(), cur.begin(), cur.end());
    }
    locs.coords = std::move(out);
    (void)d;
}

Locations uniform_points(const Box& box, double intensity, Rng& rng) {
    Locations locs{box.dim(), {}};
    const double mean = intensity * box.volume();
    if (!(mean > 0.0)) return locs;
    std::poisson_distribution<long long> count(mean);
    const long long n = count(rng);
    locs.coords.reserve(static_cast<std::size_t>(n) * box.dim());
    for (long long i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < box.dim(); ++k) {
            std::uniform_real_distribution<double> u(box.lo[k], box.hi[k]);
            locs.coords.push_back(u(rng));
        }
    }
    return locs;
}

Locations sample_poisson(const PoissonGround& g, const Box& box, Rng& rng) {
    Locations locs = uniform_points(box, g.intensity, rng);
    sort_and_dedupe(locs);
    return locs;
}

Locations sample_hardcore(const HardcoreGround& g, const Box& box, Rng& rng) {
    const std::size_t d = box.dim();
    Box dilated = box;
    for (std::size_t k = 0; k < d; ++k) {
        dilated.lo[k] -= g.min_dist;
        dilated.hi[k] += g.min_dist;
    }
    Locations proposals = uniform_points(dilated, g.proposal_intensity, rng);
    const std::size_t n = proposals.size();
    std::vector<double> birth(n);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (double& b : birth) b = u01(rng);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return proposals.coords[a * d] < proposals.coords[b * d]; });

    std::vector<bool> keep(n, true);
    for (std::size_t a = 0; a < n; ++a) {
        const std::size_t i = order[a];
        const double xi = proposals.coords[i * d];
        auto inhibited_by = [&](std::size_t j) {
            return birth[j] < birth[i] && std::abs(dis(proposals.at(i), proposals.at(j))) < g.min_dist;
        };
        for (std::size_t b = a + 1; b < n && proposals.coords[order[b] * d] - xi < g.min_dist; ++b) {
            if (inhibited_by(order[b])) keep[i] = false;
        }
        for (std::size_t b = a; b-- > 0 && xi - proposals.coords[order[b] * d] < g.min_dist;) {
            if (inhibited_by(order[b])) keep[i] = false;
        }
    }

    Locations out{d, {}};
    for (std::size_t i = 0; i < n; ++i) {
        if (keep[i] && box.contains(proposals.at(i))) {
            auto loc = proposals.at(i);
            out.coords.insert(out.coords.end(), loc.begin(), loc.end());
        }
    }
    const double expected = matern2_retained_intensity(g.proposal_intensity, g.min_dist, d) * box.volume();
    if (expected < 1.0) {
        warn("hardcore ground: expected retained count " + std::to_string(expected) +
             " < 1 on this window; min_dist is large relative to the proposal intensity");
    }
    sort_and_dedupe(out);
    return out;
}

Locations sample_grid(const GridGround& g, const Box& box, Rng& rng) {
    const std::size_t d = box.dim();
    std::vector<std::size_t> nodes(d);
    for (std::size_t k = 0; k < d; ++k) {
        nodes[k] = static_cast<std::size_t>(std::floor((box.hi[k] - box.lo[k]) / g.spacing + 1e-9)) + 1;
    }
    std::uniform_real_distribution<double> jit(-g.jitter, g.jitter);
    Locations out{d, {}};
    std::vector<std::size_t> idx(d, 0);
    std::vector<double> loc(d);
    while (true) {
        for (std::size_t k = 0; k < d; ++k) {
            loc[k] = box.lo[k] + static_cast<double>(idx[k]) * g.spacing;
            if (g.jitter > 0.0) loc[k] += jit(rng);
        }
        if (box.contains(loc)) out.coords.insert(out.coords.end(), loc.begin(), loc.end());
        std::size_t k = d;
        while (k-- > 0) {
            if (++idx[k] < nodes[k]) break;
            idx[k] = 0;
        }
        if (k == static_cast<std::size_t>(-1)) break;
    }
    sort_and_dedupe(out);
    return out;
}

double draw_mark(const MarkDistribution& dist, Rng& rng) {
    return std::visit(overloaded{
                          [&](const NormalMarks& m) {
                              if (m.sd == 0.0) return m.mean;
                              std::normal_distribution<double> nd(m.mean, m.sd);
                              return nd(rng);
                          },
                          [&](const UniformMarks& m) {
                              if (m.a == m.b) return m.a;
                              std::uniform_real_distribution<double> ud(m.a, m.b);
                              return ud(rng);
                          },
                          [&](const ConstantMarks& m) { return m.c; },
                      },
                      dist);
}

void check_ground(const GroundSpec& g) {
    std::visit(overloaded{
                   [](const PoissonGround& p) {
                       if (!(p.intensity > 0.0) || !std::isfinite(p.intensity))
                           throw InputError("poisson intensity must be finite and > 0");
                   },
                   [](const HardcoreGround& h) {
                       if (!(h.proposal_intensity > 0.0) || !std::isfinite(h.proposal_intensity))
                           throw InputError("hardcore proposal intensity must be finite and > 0");
                       if (!(h.min_dist > 0.0) || !std::isfinite(h.min_dist))
                           throw InputError("hardcore min_dist must be finite and > 0");
                   },
                   [](const GridGround& gr) {
                       if (!(gr.spacing > 0.0) || !std::isfinite(gr.spacing))
                           throw InputError("grid spacing must be finite and > 0");
                       if (!(gr.jitter >= 0.0) || !std::isfinite(gr.jitter))
                           throw InputError("grid jitter must be finite and >= 0");
                   },
               },
               g);
}

void check_covariance(const CovarianceModel& c) {
    if (!(c.variance >= 0.0) || !std::isfinite(c.variance)) throw InputError("covariance variance must be >= 0");
    if (!(c.range > 0.0) || !std::isfinite(c.range)) throw InputError("covariance range must be finite and > 0");
}

void check_marks(const MarkSpec& m) {
    std::visit(overloaded{
                   [](const IidMarks& iid) {
                       std::visit(overloaded{
                                      [](const NormalMarks& n) {
                                          if (!(n.sd >= 0.0) || !std::isfinite(n.mean) || !std::isfinite(n.sd))
                                              throw InputError("normal marks need finite mean and sd >= 0");
                                      },
                                      [](const UniformMarks& u) {
                                          if (!(u.a <= u.b) || !std::isfinite(u.a) || !std::isfinite(u.b))
                                              throw InputError("uniform marks need finite a <= b");
                                      },
                                      [](const ConstantMarks& c) {
                                          if (!std::isfinite(c.c)) throw InputError("constant mark must be finite");
                                      },
                                  },
                                  iid.dist);
                   },
                   [](const GaussianFieldMarks& gf) {
                       if (!std::isfinite(gf.mean)) throw InputError("gaussian field mean must be finite");
                       check_covariance(gf.cov);
                   },
               },
               m);
}

void check_z(const ZRule& z) {
    std::visit(overloaded{
                   [](const UnitZ&) {},
                   [](const ConstantZ& c) {
                       if (!(c.value >= 0.0) || !std::isfinite(c.value)) throw InputError("constant z must be >= 0");
                   },
                   [](const UniformZ& u) {
                       if (!(u.a >= 0.0 && u.a <= u.b) || !std::isfinite(u.b))
                           throw InputError("uniform z needs 0 <= a <= b");
                   },
               },
               z);
}

} // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t x = index + 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    x ^= x >> 31;
    return seed ^ x;
}

double unit_ball_volume(std::size_t dim) {
    const double h = static_cast<double>(dim) / 2.0;
    return std::pow(std::numbers::pi, h) / std::tgamma(h + 1.0);
}

double matern2_retained_intensity(double proposal_intensity, double min_dist, std::size_t dim) {
    const double area = unit_ball_volume(dim) * std::pow(min_dist, static_cast<double>(dim));
    return -std::expm1(-proposal_intensity * area) / area;
}

double ground_intensity(const GroundSpec& spec, std::size_t dim) {
    return std::visit(overloaded{
                          [](const PoissonGround& p) { return p.intensity; },
                          [&](const HardcoreGround& h) {
                              return matern2_retained_intensity(h.proposal_intensity, h.min_dist, dim);
                          },
                          [&](const GridGround& g) { return std::pow(g.spacing, -static_cast<double>(dim)); },
                      },
                      spec);
}

Locations sample_ground(const GroundSpec& spec, const Box& sim_window, std::uint64_t seed) {
    check_ground(spec);
    if (sim_window.dim() == 0) throw InputError("simulation window has no dimensions");
    for (std::size_t k = 0; k < sim_window.dim(); ++k) {
        if (!(sim_window.hi[k] > sim_window.lo[k])) throw InputError("simulation window is degenerate");
    }
    Rng rng(seed);
    return std::visit(overloaded{
                          [&](const PoissonGround& p) { return sample_poisson(p, sim_window, rng); },
                          [&](const HardcoreGround& h) { return sample_hardcore(h, sim_window, rng); },
                          [&](const GridGround& g) { return sample_grid(g, sim_window, rng); },
                      },
                      spec);
}

double CovarianceModel::operator()(double h) const {
    h = std::abs(h);
    if (h > range) return 0.0;
    const double r = h / range;
    switch (shape) {
    case CovarianceShape::spherical:
        return variance * (1.0 - 1.5 * r + 0.5 * r * r * r);
    case CovarianceShape::truncated_exponential:
        return variance * std::exp(-3.0 * r);
    }
    return 0.0;
}

GaussianFieldSampler::GaussianFieldSampler(const Locations& locations, const GaussianFieldMarks& spec)
    : mean_(spec.mean) {
    check_covariance(spec.cov);
    const std::size_t n = locations.size();
    const std::size_t d = locations.dim;
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
        return locations.coords[a * d] < locations.coords[b * d];
    });
    const double sigma2 = spec.cov.variance;
    if (n == 0 || sigma2 == 0.0) {
        lower_.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        return;
    }

    std::vector<Eigen::Triplet<double>> entries;
    for (std::size_t a = 0; a < n; ++a) {
        const std::size_t i = order_[a];
        for (std::size_t b = a + 1; b < n; ++b) {
            const std::size_t j = order_[b];
            if (locations.coords[j * d] - locations.coords[i * d] > spec.cov.range) break;
            const double c = spec.cov(std::abs(dis(locations.at(i), locations.at(j))));
            if (c != 0.0) entries.emplace_back(static_cast<int>(b), static_cast<int>(a), c);
        }
    }

    using Llt = Eigen::SimplicialLLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::NaturalOrdering<int>>;
    for (double rel = 0.0; rel <= 1e-6 * (1.0 + 1e-9); rel = rel == 0.0 ? 1e-10 : rel * 10.0) {
        std::vector<Eigen::Triplet<double>> all = entries;
        for (std::size_t a = 0; a < n; ++a) {
            all.emplace_back(static_cast<int>(a), static_cast<int>(a), sigma2 * (1.0 + rel));
        }
        Eigen::SparseMatrix<double> cov(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        cov.setFromTriplets(all.begin(), all.end());
        Llt llt(cov);
        if (llt.info() == Eigen::Success) {
            lower_ = llt.matrixL();
            jitter_ = rel * sigma2;
            if (rel > 0.0) warn("gaussian field covariance needed diagonal jitter " + std::to_string(jitter_));
            return;
        }
    }
    throw NumericError("gaussian field covariance matrix is not positive definite even with jitter 1e-6*sigma^2");
}

std::vector<double> GaussianFieldSampler::draw(Rng& rng) const {
    const std::size_t n = order_.size();
    std::vector<double> y(n, mean_);
    if (lower_.nonZeros() == 0) return y;
    std::normal_distribution<double> nd(0.0, 1.0);
    Eigen::VectorXd z(static_cast<Eigen::Index>(n));
    for (Eigen::Index k = 0; k < z.size(); ++k) z[k] = nd(rng);
    const Eigen::VectorXd v = lower_ * z;
    for (std::size_t k = 0; k < n; ++k) y[order_[k]] = mean_ + v[static_cast<Eigen::Index>(k)];
    return y;
}

Marks sample_marks(const Locations& locations, const MarkSpec& spec, std::uint64_t seed, const ZRule& z_rule) {
    check_marks(spec);
    check_z(z_rule);
    for (double c : locations.coords) {
        if (!std::isfinite(c)) throw InputError("mark sampling needs finite locations");
    }
    Rng rng(seed);
    Marks marks;
    const std::size_t n = locations.size();
    marks.y = std::visit(overloaded{
                             [&](const IidMarks& iid) {
                                 std::vector<double> y(n);
                                 for (double& v : y) v = draw_mark(iid.dist, rng);
                                 return y;
                             },
                             [&](const GaussianFieldMarks& gf) { return GaussianFieldSampler(locations, gf).draw(rng); },
                         },
                         spec);
    Rng zrng(derive_seed(seed, 1));
    marks.z = std::visit(overloaded{
                             [&](const UnitZ&) { return std::vector<double>(n, 1.0); },
                             [&](const ConstantZ& c) { return std::vector<double>(n, c.value); },
                             [&](const UniformZ& u) {
                                 std::vector<double> z(n, u.a);
                                 if (u.b > u.a) {
                                     std::uniform_real_distribution<double> ud(u.a, u.b);
                                     for (double& v : z) v = ud(zrng);
                                 }
                                 return z;
                             },
                         },
                         z_rule);
    return marks;
}

void MixtureSpec::validate() const {
    if (dim == 0) throw InputError("mixture dimension must be positive");
    if (classes.empty()) throw InputError("mixture needs at least one class");
    double total = 0.0;
    for (const MixtureClass& c : classes) {
        if (!(c.p > 0.0) || !std::isfinite(c.p)) throw InputError("class probabilities must be > 0");
        total += c.p;
        check_ground(c.ground);
        check_marks(c.marks);
        check_z(c.z);
        if (std::holds_alternative<GaussianFieldMarks>(c.marks) && dim > 3) {
            warn("finite-range covariance models are only guaranteed positive definite for d <= 3");
        }
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw InputError("class probabilities sum to " + std::to_string(total) + ", expected 1");
    }
}

PointPattern sample_class(const MixtureClass& cls, const Box& sim_window, std::uint64_t seed) {
    const Locations locs = sample_ground(cls.ground, sim_window, derive_seed(seed, 1));
    Marks marks = sample_marks(locs, cls.marks, derive_seed(seed, 2), cls.z);
    return {sim_window.dim(), sim_window, locs.coords, std::move(marks.y), std::move(marks.z)};
}

Realization sample_realization(const MixtureSpec& spec, const Box& sim_window, std::uint64_t seed) {
    if (sim_window.dim() != spec.dim) throw InputError("simulation window dimension does not match the mixture");
    Rng rng(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double draw = u01(rng);
    std::size_t k = 0;
    double cumulative = spec.classes[0].p;
    while (draw >= cumulative && k + 1 < spec.classes.size()) cumulative += spec.classes[++k].p;
    return {sample_class(spec.classes[k], sim_window, seed), k, seed};
}

std::vector<Realization> sample_mixture(const MixtureSpec& spec, const Box& sim_window, std::size_t n_realizations,
                                        std::uint64_t seed, unsigned threads) {
    spec.validate();
    if (n_realizations < 1) throw InputError("n_realizations must be >= 1");
    return parallel::map_indexed(
        n_realizations, [&](std::size_t i) { return sample_realization(spec, sim_window, derive_seed(seed, i)); },
        threads);
}

} // namespace mppstat::sim
