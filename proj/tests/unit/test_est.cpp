#include "helpers.hpp"

#include "mppstat/error.hpp"
#include "mppstat/est.hpp"
#include "mppstat/sim.hpp"

#include <doctest.h>

#include <cmath>

using namespace mppstat;
using namespace mppstat::est;

namespace {

PointPattern line_fixture() {
    std::vector<MarkedPoint> pts{{{0.0}, 2.0, 1.0}, {{0.5}, 4.0, 1.0}, {{2.0}, 6.0, 1.0}};
    return PointPattern::from_points(1, Box::cube(1, 0.0, 3.0), pts);
}

PairSums sums(double value, std::int64_t pairs) {
    return {value * static_cast<double>(pairs), static_cast<double>(pairs), pairs};
}

std::vector<PointPattern> simulate(const sim::MixtureSpec& spec, double T, const Band& band, std::size_t n,
                                   std::uint64_t seed) {
    const Window win = Window::cube(1, T);
    const Band bands[] = {band};
    std::vector<PointPattern> out;
    for (auto& r : sim::sample_mixture(spec, buffered_window(win, bands), n, seed)) out.push_back(std::move(r.pattern));
    return out;
}

} // namespace

TEST_SUITE("est") {

TEST_CASE("mu_hat on the line fixture") {
    const auto r = mu_hat(line_fixture(), Window({3.0}), Band(0.4, 0.6, true), builtin("first"));
    CHECK(r.defined);
    CHECK(r.value == 2.0);
    CHECK(r.pair_count_used == 1);
}

TEST_CASE("mu_hat of constant marks is the constant") {
    std::mt19937_64 rng(1);
    auto p = testutil::random_pattern(rng, 1, 60, 0.0, 10.0);
    p = p.with_marks(std::vector<double>(p.size(), 3.25), p.zs());
    const auto r = mu_hat(p, Window({9.0}), Band(-1.0, 1.0, true), builtin("first"));
    REQUIRE(r.defined);
    CHECK(r.value == doctest::Approx(3.25).epsilon(1e-14));
}

TEST_CASE("mu_hat without qualifying pairs is undefined") {
    const auto r = mu_hat(line_fixture(), Window({3.0}), Band(2.5, 2.9, true), builtin("first"));
    CHECK_FALSE(r.defined);
    CHECK(r.pair_count_used == 0);
}

TEST_CASE("mu_hat_cond") {
    const auto p = line_fixture();
    const Window win({3.0});
    // Band [-2.1, 2.1] restricted to y2 = 6 gives pairs with first marks 2 and 4.
    const Band band(-2.1, 2.1, true);
    const auto first = builtin("first");
    CHECK(mu_hat_cond(p, win, band, first, builtin("const_one")).value == mu_hat(p, win, band, first).value);
    CHECK_FALSE(mu_hat_cond(p, win, band, first, indicator_pair(100, 200, 100, 200)).defined);
    const auto sel = indicator_pair(-INFINITY, INFINITY, 5.5, 6.5);
    const auto above3 = indicator_pair(3.0, INFINITY, -INFINITY, INFINITY);
    // Pairs (2 -> 6), (4 -> 6); conditioning on y1 > 3 keeps the second.
    const auto cond = multiply(sel, above3);
    const auto r = mu_hat_cond(p, win, band, first, cond);
    REQUIRE(r.defined);
    CHECK(r.value == 4.0);
}

TEST_CASE("kernel estimates") {
    const auto p = line_fixture();
    const Window win({3.0});
    const auto first = builtin("first");
    const auto rect = mu_hat_kernel(p, win, 0.5, first, Kernel::rectangular, 0.1);
    REQUIRE(rect.defined);
    CHECK(rect.value == 2.0);

    const auto two = PointPattern::from_points(1, Box::cube(1, 0.0, 6.0),
                                               std::vector<MarkedPoint>{{{0.0}, 7.0, 2.0}, {{5.0}, 1.0, 1.0}});
    for (double r : {-3.0, 0.0, 5.0, 40.0}) {
        const auto g = mu_hat_kernel(two, Window({1.0}), r, first, Kernel::gaussian, 0.05);
        REQUIRE(g.defined);
        CHECK(g.value == doctest::Approx(7.0).epsilon(1e-14));
    }
    CHECK_FALSE(mu_hat_kernel(two, Window({1.0}), 0.0, first, Kernel::epanechnikov, 0.5).defined);

    std::mt19937_64 rng(2);
    const auto q = testutil::random_pattern(rng, 1, 80, 0.0, 10.0);
    const auto wide = mu_hat_kernel(q, Window({10.0}), 0.0, first, Kernel::rectangular, 20.0);
    const auto all = mu_hat(q, Window({10.0}), Band(-20.0, 20.0, true), first);
    CHECK(testutil::rel_close(wide.value, all.value, 1e-13));
    CHECK_THROWS_AS(mu_hat_kernel(q, Window({10.0}), 0.0, first, Kernel::gaussian, 0.0), InputError);
    CHECK(parse_kernel("epanechnikov") == Kernel::epanechnikov);
    CHECK_THROWS_AS(parse_kernel("box"), InputError);
}

TEST_CASE("rectangular kernel reproduces mu_hat on random patterns") {
    std::mt19937_64 rng(3);
    const auto f = builtin("product");
    for (int rep = 0; rep < 30; ++rep) {
        const auto p = testutil::random_pattern(rng, 1 + rep % 2, 100, 0.0, 6.0);
        const std::size_t d = p.dim();
        const double r = d == 1 ? -0.5 : 0.75, h = 0.25;
        const auto k = mu_hat_kernel(p, Window::cube(d, 5.0), r, f, Kernel::rectangular, h);
        const auto m = mu_hat(p, Window::cube(d, 5.0), Band::for_dim(d, r - h, r + h), f);
        REQUIRE(k.defined == m.defined);
        if (m.defined) CHECK(k.value == m.value);
    }
}

TEST_CASE("combine_equal") {
    const PairSums a[] = {sums(2, 1), sums(4, 1)};
    CHECK(combine_equal(a, Band(0, 1, true)).value == 3.0);
    const PairSums b[] = {sums(2, 1), sums(4, 5), PairSums{}};
    const auto r = combine_equal(b, Band(0, 1, true));
    CHECK(r.value == 3.0);
    CHECK(r.exclusions == 1);
    const PairSums none[] = {PairSums{}, PairSums{}};
    CHECK_FALSE(combine_equal(none, Band(0, 1, true)).defined);
}

TEST_CASE("combine_weighted") {
    const PairSums a[] = {sums(2, 1), sums(4, 1)};
    const double w10[] = {1, 0}, w13[] = {1, 3}, w00[] = {0, 0}, w11[] = {1, 1};
    CHECK(combine_weighted(a, w10, Band(0, 1, true)).value == 2.0);
    CHECK(combine_weighted(a, w13, Band(0, 1, true)).value == 3.5);
    CHECK(combine_weighted(a, w11, Band(0, 1, true)).value == combine_equal(a, Band(0, 1, true)).value);
    CHECK_THROWS_AS(combine_weighted(a, w00, Band(0, 1, true)), InputError);
    const PairSums u[] = {sums(2, 1), PairSums{}};
    CHECK_THROWS_AS(combine_weighted(u, w11, Band(0, 1, true)), InputError);
    CHECK(combine_weighted(u, w10, Band(0, 1, true)).value == 2.0);
}

TEST_CASE("combine_alpha") {
    const PairSums a[] = {sums(2, 1), sums(4, 3)};
    CHECK(combine_alpha(a, Band(0, 1, true)).value == 3.5);
    const PairSums one[] = {sums(2.5, 4)};
    CHECK(combine_alpha(one, Band(0, 1, true)).value == 2.5);
    const PairSums same[] = {sums(1.25, 4), sums(1.25, 4), sums(1.25, 4)};
    CHECK(combine_alpha(same, Band(0, 1, true)).value == 1.25);
}

TEST_CASE("multi-realization estimators on patterns") {
    std::mt19937_64 rng(4);
    std::vector<PointPattern> ps;
    for (int i = 0; i < 5; ++i) ps.push_back(testutil::random_pattern(rng, 1, 40 + 10 * i, 0.0, 8.0));
    const Window win[] = {Window({8.0})};
    const Band band(0.25, 1.0, true);
    const auto f = builtin("first");
    const auto single = mu_hat(ps[0], win[0], band, f);
    const std::span<const PointPattern> first(ps.data(), 1);
    CHECK(mu_hat_n(first, win, band, f).value == single.value);
    CHECK(testutil::rel_close(mu_hat_alpha(first, win, band, f).value, single.value, 1e-14));
    const std::vector<double> ones(ps.size(), 1.0);
    CHECK(mu_hat_weighted(ps, win, band, f, ones).value == mu_hat_n(ps, win, band, f).value);

    double num = 0, den = 0;
    for (const auto& p : ps) {
        const auto m = mu_hat(p, win[0], band, f);
        num += static_cast<double>(m.pair_count_used) * m.value;
        den += static_cast<double>(m.pair_count_used);
    }
    CHECK(testutil::rel_close(mu_hat_alpha(ps, win, band, f).value, num / den, 1e-13));

    const std::vector<Window> wrong(2, Window({8.0}));
    CHECK_THROWS_AS(mu_hat_n(ps, wrong, band, f), InputError);
}

TEST_CASE("parallel pair sums match sequential evaluation") {
    std::mt19937_64 rng(5);
    std::vector<PointPattern> ps;
    for (int i = 0; i < 12; ++i) ps.push_back(testutil::random_pattern(rng, 1, 200, 0.0, 20.0, false));
    const Window win[] = {Window({20.0})};
    const auto a = pair_sums(ps, win, Band(-1, 1, true), builtin("product"), 1);
    const auto b = pair_sums(ps, win, Band(-1, 1, true), builtin("product"), 4);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].weighted_f == b[i].weighted_f);
        CHECK(a[i].weighted_one == b[i].weighted_one);
        CHECK(a[i].pairs == b[i].pairs);
    }
}

TEST_CASE("concatenation reproduces the weighted estimator") {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> wd(0.0, 3.0);
    const auto f = builtin("product");
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<PointPattern> ps;
        std::vector<Window> wins;
        std::vector<double> w;
        const Band band = rep % 2 ? Band(0.25, 1.5, true) : Band(-1.0, 0.5, true);
        for (int i = 0; i < 4; ++i) {
            const double T = 4.0 + i;
            ps.push_back(testutil::random_pattern(rng, 1, 30 + 5 * i, -1.5, T + 1.5, false));
            wins.emplace_back(std::vector<double>{T});
            w.push_back(i == 0 ? 0.0 : wd(rng));
        }
        const auto c = concat_patterns(ps, wins, band, w);
        const auto lhs = mu_hat(c.pattern, c.window, band, f);
        const auto rhs = mu_hat_weighted(ps, wins, band, f, w);
        REQUIRE(lhs.defined);
        CHECK(testutil::rel_close(lhs.value, rhs.value, 1e-12));
    }
}

TEST_CASE("concatenation special cases") {
    std::mt19937_64 rng(7);
    const auto p = testutil::random_pattern(rng, 1, 50, 0.0, 6.0);
    const Window win[] = {Window({5.0})};
    const Band band(0.5, 1.0, true);
    const auto f = builtin("first");
    const auto base = mu_hat(p, win[0], band, f).value;
    const PointPattern one[] = {p};
    const double w1[] = {1.0};
    const auto c1 = concat_patterns(one, win, band, w1);
    CHECK(testutil::rel_close(mu_hat(c1.pattern, c1.window, band, f).value, base, 1e-12));
    const PointPattern two[] = {p, p};
    const double w2[] = {1.0, 1.0};
    const auto c2 = concat_patterns(two, win, band, w2);
    CHECK(testutil::rel_close(mu_hat(c2.pattern, c2.window, band, f).value, base, 1e-12));

    std::mt19937_64 rng2(8);
    const PointPattern planar[] = {testutil::random_pattern(rng2, 2, 10, 0.0, 1.0)};
    CHECK_THROWS_AS(concat_patterns(planar, std::vector<Window>{Window::cube(2, 1.0)}, Band(0, 1, false), w1),
                    InputError);
}

TEST_CASE("translation and z-scaling invariance") {
    std::mt19937_64 rng(9);
    const auto f = builtin("product");
    for (int rep = 0; rep < 30; ++rep) {
        const std::size_t d = 1 + rep % 3;
        const auto p = testutil::random_pattern(rng, d, 90, -1.0, 6.0);
        const Window win = Window::cube(d, 5.0);
        const Band band = Band::for_dim(d, d == 1 ? -1.0 : 0.25, 1.0);
        const auto base = mu_hat(p, win, band, f);
        std::vector<double> x(d, 0.375 * (rep - 15));
        const auto shifted = mu_hat(translate(p, x), translate(win, x), band, f);
        CHECK(shifted.defined == base.defined);
        if (base.defined) CHECK(shifted.value == base.value);

        std::vector<double> z = p.zs();
        for (double& v : z) v *= 3.7;
        const auto scaled = mu_hat(p.with_marks(p.ys(), z), win, band, f);
        if (base.defined) CHECK(testutil::rel_close(scaled.value, base.value, 1e-12));
    }
}

TEST_CASE("smoothing identity over adjacent bands") {
    std::mt19937_64 rng(10);
    const auto f = builtin("first_squared");
    // Coordinates are multiples of 2^-10, so [0.25, 1] is the disjoint union
    // of [0.25, 0.5] and [0.5 + 2^-10, 1] on the lattice of differences.
    const Band i1(0.25, 0.5, true), i2(0.5 + std::ldexp(1.0, -10), 1.0, true), u(0.25, 1.0, true);
    for (int rep = 0; rep < 30; ++rep) {
        const auto p = testutil::random_pattern(rng, 1, 120, 0.0, 10.0);
        const Window win({9.0});
        const auto a = pair_sums(p, win, i1, f), b = pair_sums(p, win, i2, f);
        if (!a.defined() || !b.defined()) continue;
        const double expected =
            (a.weighted_one * a.ratio() + b.weighted_one * b.ratio()) / (a.weighted_one + b.weighted_one);
        CHECK(testutil::rel_close(mu_hat(p, win, u, f).value, expected, 1e-13));
        CHECK(pair_sums(p, win, u, f).pairs == a.pairs + b.pairs);
    }
}

TEST_CASE("mu_hat is consistent on an ergodic process") {
    const sim::MixtureSpec spec{1, {{1.0, sim::PoissonGround{1.0}, sim::IidMarks{sim::NormalMarks{2.0, 1.0}}}}};
    const Band band(0.5, 1.5, true);
    const auto f = builtin("first");
    auto rmse = [&](double T) {
        const auto ps = simulate(spec, T, band, 200, static_cast<std::uint64_t>(T));
        double s = 0;
        for (const auto& p : ps) {
            const auto m = mu_hat(p, Window::cube(1, T), band, f);
            REQUIRE(m.defined);
            s += (m.value - 2.0) * (m.value - 2.0);
        }
        return std::sqrt(s / 200.0);
    };
    CHECK(rmse(200.0) < rmse(25.0));
}

TEST_CASE("mu_hat_alpha and mu_hat_n separate under class-dependent intensities") {
    const Band band(0.5, 1.5, true);
    const auto f = builtin("first");
    const Window win[] = {Window::cube(1, 50.0)};
    auto cls = [](double lambda, double mean) {
        return sim::MixtureClass{0.5, sim::PoissonGround{lambda}, sim::IidMarks{sim::NormalMarks{mean, 1.0}}};
    };
    auto run = [&](double l1, double l2, std::uint64_t seed) {
        const sim::MixtureSpec spec{1, {cls(l1, 0.0), cls(l2, 10.0)}};
        const auto ps = simulate(spec, 50.0, band, 400, seed);
        const auto s = pair_sums(ps, win, band, f);
        std::vector<double> pairs;
        for (const auto& x : s) pairs.push_back(static_cast<double>(x.pairs));
        struct Out {
            double n, n_se, alpha, alpha_se;
        };
        return Out{combine_equal(s, band).value, jackknife_se(s, {}), combine_alpha(s, band).value,
                   jackknife_se(s, pairs)};
    };
    // Poisson pair intensity is λ² |I|, so the pooled target is
    // (1·0 + 16·10) / 17 and the equal-weight target is 5.
    const auto het = run(1.0, 4.0, 21);
    CHECK(std::abs(het.n - 5.0) < 4 * het.n_se);
    CHECK(std::abs(het.alpha - 160.0 / 17.0) < 4 * het.alpha_se);
    CHECK(std::abs(het.alpha - het.n) > 8 * std::max(het.n_se, het.alpha_se));
    const auto hom = run(2.0, 2.0, 22);
    CHECK(std::abs(hom.n - 5.0) < 4 * hom.n_se);
    CHECK(std::abs(hom.alpha - 5.0) < 4 * hom.alpha_se);
}

TEST_CASE("jackknife standard error") {
    const PairSums one[] = {sums(1, 1)};
    CHECK(std::isnan(jackknife_se(one, {})));
    const PairSums same[] = {sums(2, 3), sums(2, 4), sums(2, 5)};
    CHECK(jackknife_se(same, {}) == 0.0);
    // Equal weights: the jackknife SE of a mean is the usual s / sqrt(n).
    const PairSums v[] = {sums(1, 1), sums(2, 1), sums(4, 1), sums(7, 1)};
    const double m = 3.5, s2 = ((1 - m) * (1 - m) + (2 - m) * (2 - m) + (4 - m) * (4 - m) + (7 - m) * (7 - m)) / 3;
    CHECK(jackknife_se(v, {}) == doctest::Approx(std::sqrt(s2 / 4)));
}

} // TEST_SUITE
