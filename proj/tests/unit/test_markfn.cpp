#include "mppstat/error.hpp"
#include "mppstat/markfn.hpp"

#include <doctest.h>

#include <limits>
#include <random>

using namespace mppstat;

TEST_SUITE("markfn") {

TEST_CASE("builtins") {
    CHECK(builtin("product")(3, 4) == 12);
    CHECK(builtin("first")(3, 4) == 3);
    CHECK(builtin("first_squared")(3, 4) == 9);
    CHECK(builtin("const_one")(7, -2) == 1);
    CHECK(builtin("first").first_only());
    CHECK_FALSE(builtin("product").first_only());
    CHECK_THROWS_AS(builtin("second"), InputError);
}

TEST_CASE("threshold family") {
    const auto t = threshold(builtin("first"), 2.0);
    CHECK(t.excess(5) == 3);
    CHECK(t.indicator(5) == 1);
    CHECK(t.excess(2) == 0);
    CHECK(t.indicator(2) == 0);
    CHECK(threshold(builtin("first_squared"), 4.0).excess(3) == 5);
    CHECK_THROWS_AS(threshold(builtin("first"), -0.5), InputError);
    CHECK_THROWS_AS(threshold(builtin("product"), 1.0), InputError);
    CHECK(t.excess_function()(5, 100) == 3);
    CHECK(t.indicator_function()(1, 100) == 0);
}

TEST_CASE("threshold identities hold on random marks") {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> n(1.0, 3.0);
    for (double u : {0.0, 0.5, 2.0, 7.0}) {
        for (const char* base : {"first", "first_squared"}) {
            const auto t = threshold(builtin(base), u);
            for (int k = 0; k < 1000; ++k) {
                const double y = n(rng);
                const double f = builtin(base)(y, 0.0);
                CHECK(t.excess(y) + u * t.indicator(y) == doctest::Approx(f * t.indicator(y)).epsilon(1e-15));
                CHECK(t.indicator(y) * t.indicator(y) == t.indicator(y));
            }
        }
    }
}

TEST_CASE("indicator_pair") {
    const auto f = indicator_pair(0, 1, 0, 1);
    CHECK(f(0.5, 0.5) == 1);
    CHECK(f(2, 0.5) == 0);
    CHECK(f(0.5, 2) == 0);
    CHECK(f(1, 0) == 1);
    constexpr double inf = std::numeric_limits<double>::infinity();
    const auto all = indicator_pair(-inf, inf, -inf, inf);
    CHECK(all(-1e300, 1e300) == 1);
    CHECK(all.first_only());
    CHECK_FALSE(f.first_only());
    CHECK_THROWS_AS(indicator_pair(1, 0, 0, 1), InputError);
    CHECK_THROWS_AS(indicator_pair(0, 1, 2, 1), InputError);
    CHECK_THROWS_AS(indicator_pair(std::nan(""), 1, 0, 1), InputError);
}

TEST_CASE("declared properties are probed") {
    CHECK_THROWS_AS(MarkFunction("neg", [](double a, double) { return a; }, Arity::first_only), InputError);
    CHECK_THROWS_AS(MarkFunction("second", [](double, double b) { return b * b; }, Arity::first_only), InputError);
    CHECK_NOTHROW(MarkFunction("second", [](double, double b) { return b * b; }, Arity::both));
    CHECK_THROWS_AS(MarkFunction("empty", MarkFunction::Eval{}, Arity::both), InputError);
}

TEST_CASE("multiply") {
    const auto g = multiply(builtin("first"), threshold(builtin("first"), 1.0).indicator_function());
    CHECK(g(3, 0) == 3);
    CHECK(g(0.5, 0) == 0);
    CHECK(g.first_only());
    CHECK_FALSE(multiply(builtin("product"), builtin("const_one")).first_only());
}

TEST_CASE("registry") {
    const auto reg = MarkFunctionRegistry::with_builtins();
    CHECK(reg.contains("threshold_excess"));
    CHECK(reg.make({"threshold_excess", {{"u", 1.0}}, ""})(3, 0) == 2);
    CHECK(reg.make({"threshold_indicator", {{"u", 4.0}}, "first_squared"})(3, 0) == 1);
    CHECK(reg.make({"indicator_pair", {{"a_lo", 0.0}, {"a_hi", 1.0}}, ""})(0.5, 99) == 1);
    CHECK_THROWS_AS(reg.make({"threshold_excess", {}, ""}), InputError);
    CHECK_THROWS_AS(reg.make({"nope", {}, ""}), InputError);
    auto custom = reg;
    custom.add("double_first", [](const MarkFunctionDescriptor&) {
        return MarkFunction("double_first", [](double a, double) { return 2 * a; }, Arity::first_only,
                            Sign::may_be_negative);
    });
    CHECK(custom.make({"double_first", {}, ""})(2, 0) == 4);
}

} // TEST_SUITE
