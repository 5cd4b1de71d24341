#include "mppstat/error.hpp"
#include "mppstat/oracle.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace mppstat;
using namespace mppstat::oracle;

namespace {

sim::MixtureClass poisson(double p, double lambda, double mean, double sd = 1.0) {
    return {p, sim::PoissonGround{lambda}, sim::IidMarks{sim::NormalMarks{mean, sd}}};
}

sim::MixtureSpec two_class(double l1, double l2, double m1 = 0.0, double m2 = 10.0) {
    return {1, {poisson(0.5, l1, m1), poisson(0.5, l2, m2)}};
}

const Band kBand(0.5, 1.5, true);

/// ∫_0^a of the unit spherical covariance with range r.
double spherical_integral(double a, double r) { return a - 0.75 * a * a / r + 0.125 * std::pow(a, 4) / std::pow(r, 3); }

} // namespace

TEST_SUITE("oracle") {

TEST_CASE("first-order closed forms") {
    const auto f = builtin("first");
    CHECK(closed_form_mu(two_class(1, 4), f, Order::first) == doctest::Approx(8.0).epsilon(1e-14));
    CHECK(closed_form_mu(two_class(2, 2), f, Order::first) == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(closed_form_mu_tilde(two_class(1, 4), f, Order::first) == doctest::Approx(5.0).epsilon(1e-14));
    const sim::MixtureSpec one{1, {poisson(1.0, 3.0, 1.25)}};
    CHECK(closed_form_mu(one, f, Order::first) == 1.25);
    CHECK(closed_form_mu_tilde(one, f, Order::first) == 1.25);
    CHECK(closed_form_mu_tilde(two_class(1, 4, 7, 7), f, Order::first) == doctest::Approx(7.0));
    CHECK_THROWS_AS(closed_form_mu(one, builtin("product"), Order::first), InputError);
}

TEST_CASE("second-order closed forms with Poisson pair intensities") {
    const auto f = builtin("first");
    CHECK(closed_form_mu(two_class(1, 4), f, Order::second, kBand) == doctest::Approx(160.0 / 17.0).epsilon(1e-14));
    CHECK(closed_form_mu_tilde(two_class(1, 4), f, Order::second, kBand) == doctest::Approx(5.0).epsilon(1e-14));
    const auto m = class_moments(poisson(1.0, 3.0, 2.0), 1, f, Order::second, kBand);
    CHECK(m.pair_intensity == doctest::Approx(9.0));
    const auto m2 = class_moments(poisson(1.0, 3.0, 2.0), 2, f, Order::second, Band(0.5, 1.0, false));
    CHECK(m2.pair_intensity == doctest::Approx(9.0 * M_PI * 0.75));
    CHECK_THROWS_AS(closed_form_mu(two_class(1, 4), f, Order::second), InputError);
    // z-weighted classes
    sim::MixtureSpec z = two_class(1, 1);
    z.classes[1].z = sim::ConstantZ{3.0};
    CHECK(closed_form_mu(z, f, Order::second, kBand) == doctest::Approx(7.5));
}

TEST_CASE("mixture means are convex combinations and tilt toward intense classes") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> lam(0.2, 5.0), mean(-5.0, 5.0);
    const auto f = builtin("first");
    for (int rep = 0; rep < 200; ++rep) {
        const double l1 = lam(rng), l2 = lam(rng), l3 = lam(rng), m1 = mean(rng), m2 = mean(rng), m3 = mean(rng);
        const sim::MixtureSpec spec{1, {poisson(0.2, l1, m1), poisson(0.5, l2, m2), poisson(0.3, l3, m3)}};
        const double lo = std::min({m1, m2, m3}) - 1e-12, hi = std::max({m1, m2, m3}) + 1e-12;
        for (Order o : {Order::first, Order::second}) {
            const double mu = closed_form_mu(spec, f, o, kBand);
            const double mt = closed_form_mu_tilde(spec, f, o, kBand);
            CHECK(mu >= lo);
            CHECK(mu <= hi);
            CHECK(mt >= lo);
            CHECK(mt <= hi);
        }
        const sim::MixtureSpec equal{1, {poisson(0.2, l1, m1), poisson(0.5, l1, m2), poisson(0.3, l1, m3)}};
        for (Order o : {Order::first, Order::second}) {
            CHECK(closed_form_mu(equal, f, o, kBand) ==
                  doctest::Approx(closed_form_mu_tilde(equal, f, o, kBand)).epsilon(1e-13));
        }
        // Two classes, intensity ordered like the mean.
        const sim::MixtureSpec assoc = two_class(std::min(l1, l2), std::max(l1, l2), std::min(m1, m2), std::max(m1, m2));
        for (Order o : {Order::first, Order::second}) {
            CHECK(closed_form_mu(assoc, f, o, kBand) >= closed_form_mu_tilde(assoc, f, o, kBand) - 1e-12);
        }
    }
}

TEST_CASE("hardcore classes only support the equal-weight target") {
    const sim::MixtureSpec hc{1, {{1.0, sim::HardcoreGround{2.0, 0.3}, sim::IidMarks{sim::NormalMarks{1.0, 1.0}}}}};
    const auto f = builtin("first");
    CHECK_THROWS_AS(closed_form_mu(hc, f, Order::second, kBand), UnsupportedSpecError);
    CHECK(closed_form_mu_tilde(hc, f, Order::second, kBand) == doctest::Approx(1.0));
    CHECK_THROWS_AS(pair_density(hc.classes[0].ground, 1, 0.5), UnsupportedSpecError);
}

TEST_CASE("pair densities") {
    CHECK(pair_density(sim::PoissonGround{2.0}, 1, -0.3) == 4.0);
    CHECK(pair_density(sim::PoissonGround{2.0}, 2, 0.5) == doctest::Approx(4.0 * 2.0 * M_PI * 0.5));
    CHECK_THROWS_AS(pair_density(sim::GridGround{1.0, 0.0}, 1, 1.0), InputError);
    // Jittered unit grid: exactly one neighbour in [0.5, 1.5] per point.
    const sim::GridGround g{1.0, 0.2};
    const int steps = 20000;
    double s = 0.0;
    for (int i = 0; i < steps; ++i) s += pair_density(g, 1, 0.5 + (i + 0.5) / steps) / steps;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(pair_density(g, 1, 1.0) == doctest::Approx(1.0 / 0.4));
    CHECK(pair_density(g, 1, 0.55) == 0.0);
    const auto m = class_moments({1.0, g, sim::IidMarks{sim::NormalMarks{0.0, 1.0}}}, 1, builtin("first"),
                                 Order::second, kBand);
    CHECK(m.pair_intensity == doctest::Approx(1.0).epsilon(1e-12));
    const auto atoms = class_moments({1.0, sim::GridGround{0.5, 0.0}, sim::IidMarks{sim::NormalMarks{0.0, 1.0}}}, 1,
                                     builtin("first"), Order::second, kBand);
    CHECK(atoms.pair_intensity == doctest::Approx(3.0 / 0.5));
}

TEST_CASE("pointwise and band mark means for a field") {
    const sim::MixtureClass cls{1.0, sim::PoissonGround{1.0},
                                sim::GaussianFieldMarks{2.0, {sim::CovarianceShape::spherical, 1.5, 0.4}}};
    const auto prod = builtin("product");
    CHECK(pointwise_mark_mean(cls, prod, 0.0) == doctest::Approx(4.0 + 1.5).epsilon(1e-9));
    CHECK(pointwise_mark_mean(cls, prod, 0.5) == doctest::Approx(4.0).epsilon(1e-9));
    CHECK(pointwise_mark_mean(cls, builtin("first_squared"), 0.5) == doctest::Approx(5.5).epsilon(1e-9));
    const double expected = 4.0 + 1.5 * (spherical_integral(0.3, 0.4) - spherical_integral(0.1, 0.4)) / 0.2;
    const auto m = class_moments(cls, 1, prod, Order::second, Band(0.1, 0.3, true));
    CHECK(m.mark_mean_f == doctest::Approx(expected).epsilon(1e-9));
    const auto neg = class_moments(cls, 1, prod, Order::second, Band(-0.3, -0.1, true));
    CHECK(neg.mark_mean_f == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("smoothed form reduces to the closed form") {
    const auto prod = builtin("product");
    const sim::MixtureSpec iid = two_class(1.0, 3.0, -1.0, 2.0);
    CHECK(smoothed_mu_tilde(iid, prod, kBand) ==
          doctest::Approx(closed_form_mu_tilde(iid, prod, Order::second, kBand)).epsilon(1e-9));
    const sim::MixtureSpec grid{1,
                                {{0.4, sim::GridGround{1.0, 0.2}, sim::IidMarks{sim::UniformMarks{0.0, 2.0}}},
                                 {0.6, sim::PoissonGround{2.0}, sim::IidMarks{sim::NormalMarks{3.0, 0.5}}}}};
    CHECK(smoothed_mu_tilde(grid, prod, kBand) ==
          doctest::Approx(closed_form_mu_tilde(grid, prod, Order::second, kBand)).epsilon(1e-9));
    CHECK(closed_form_mu_tilde(grid, prod, Order::second, kBand) == doctest::Approx(0.4 * 1.0 + 0.6 * 9.0));
}

TEST_CASE("marginal threshold moments") {
    const auto f = builtin("first");
    const sim::MarkDistribution n{sim::NormalMarks{2.0, 1.0}};
    const double phi2 = std::exp(-2.0) / std::sqrt(2 * M_PI);
    const double cdf2 = 0.5 * std::erfc(-2.0 / std::sqrt(2.0));
    CHECK(conditional_excess_mean(n, f, 0.0) == doctest::Approx(2.0 + phi2 / cdf2).epsilon(1e-9));
    CHECK(exceedance_probability(n, f, 0.0) == doctest::Approx(cdf2).epsilon(1e-9));
    const sim::MarkDistribution u{sim::UniformMarks{0.0, 4.0}};
    CHECK(conditional_excess_mean(u, f, 1.0) == doctest::Approx(1.5).epsilon(1e-9));
    CHECK(exceedance_probability(u, f, 1.0) == doctest::Approx(0.75).epsilon(1e-9));
    CHECK_THROWS_AS(conditional_excess_mean(sim::MarkDistribution{sim::ConstantMarks{1.0}}, f, 2.0), InputError);
    const auto m = marginal(sim::GaussianFieldMarks{1.0, {sim::CovarianceShape::spherical, 4.0, 1.0}});
    CHECK(std::get<sim::NormalMarks>(m).sd == 2.0);
}

TEST_CASE("brute force agrees with the closed forms") {
    const auto f = builtin("first");
    const auto spec = two_class(1, 4);
    BruteForceOptions opt;
    opt.n_mc = 2000;
    opt.T = 50.0;
    opt.seed = 5;
    const auto pooled = brute_force_mu(spec, f, Order::second, kBand, opt);
    CHECK(std::abs(pooled.value - 160.0 / 17.0) < 3 * pooled.standard_error);
    opt.mode = BruteForceOptions::Mode::ratio_average;
    const auto avg = brute_force_mu(spec, f, Order::second, kBand, opt);
    CHECK(std::abs(avg.value - 5.0) < 3 * avg.standard_error);
    opt.mode = BruteForceOptions::Mode::pooled;
    const auto first = brute_force_mu(spec, f, Order::first, std::nullopt, opt);
    CHECK(std::abs(first.value - 8.0) < 3 * first.standard_error);
    opt.n_mc = 999;
    CHECK_THROWS_AS(brute_force_mu(spec, f, Order::second, kBand, opt), InputError);
}

TEST_CASE("brute force on a constant grid is exact") {
    const sim::MixtureSpec grid{1, {{1.0, sim::GridGround{1.0, 0.0}, sim::IidMarks{sim::ConstantMarks{2.5}}}}};
    BruteForceOptions opt;
    opt.T = 20.0;
    const auto r = brute_force_mu(grid, builtin("first"), Order::second, kBand, opt);
    CHECK(r.value == 2.5);
    CHECK(r.standard_error == 0.0);
    CHECK(r.n_used == 1000);
}

} // TEST_SUITE
