#include "mppstat/error.hpp"
#include "mppstat/stats.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace mppstat;
using namespace mppstat::stats;

TEST_SUITE("stats") {

TEST_CASE("normal distribution") {
    CHECK(normal_cdf(0.0) == 0.5);
    CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
    CHECK(normal_quantile(0.5) == doctest::Approx(0.0));
    for (double p : {1e-8, 0.01, 0.3, 0.9, 1 - 1e-8}) CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-10));
    CHECK_THROWS_AS(normal_quantile(0.0), InputError);
    CHECK_THROWS_AS(normal_quantile(1.0), InputError);
}

TEST_CASE("moments") {
    const std::vector<double> x{1, 2, 3, 4, 10};
    CHECK(mean(x) == 4.0);
    CHECK(variance(x) == 12.5);
    CHECK(std::isnan(variance(std::vector<double>{1.0})));
    const std::vector<double> sym{-2, -1, 0, 1, 2};
    CHECK(skewness(sym) == doctest::Approx(0.0));
    CHECK(skewness(x) > 0.0);
    // Two-point distribution: kurtosis 1, excess -2.
    const std::vector<double> two{-1, 1, -1, 1, -1, 1, -1, 1};
    CHECK(excess_kurtosis(two) == doctest::Approx(-2.0));
}

TEST_CASE("Kolmogorov tail probabilities") {
    // Asymptotic critical values: P(K > 1.3581) = 0.05, P(K > 1.6276) = 0.01.
    auto at = [](double k, double n) { return kolmogorov_p_value(k / (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)), n); };
    CHECK(at(1.3581, 1000) == doctest::Approx(0.05).epsilon(1e-3));
    CHECK(at(1.6276, 1000) == doctest::Approx(0.01).epsilon(1e-3));
    CHECK(kolmogorov_p_value(0.0, 100) == 1.0);
    CHECK(kolmogorov_p_value(1.0, 100) < 1e-12);
}

TEST_CASE("KS against the normal") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g(1.0, 2.0);
    std::vector<double> x;
    for (int i = 0; i < 2000; ++i) x.push_back(g(rng));
    const auto good = ks_normal(x, 1.0, 2.0);
    CHECK(good.p_value > 0.01);
    CHECK(good.statistic < 0.04);
    const auto bad = ks_normal(x, 0.0, 2.0);
    CHECK(bad.p_value < 1e-6);
    // D for one point at the median is 0.5.
    CHECK(ks_normal(std::vector<double>{0.0}, 0.0, 1.0).statistic == doctest::Approx(0.5));
}

} // TEST_SUITE
