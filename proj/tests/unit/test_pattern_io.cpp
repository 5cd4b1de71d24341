#include "helpers.hpp"

#include "mppstat/pattern_io.hpp"

#include <doctest.h>

#include <sstream>

using namespace mppstat;

TEST_SUITE("pattern_io") {

TEST_CASE("write/read round trip is bit exact") {
    std::mt19937_64 rng(21);
    for (std::size_t d : {1u, 2u, 3u}) {
        const auto p = testutil::random_pattern(rng, d, 60, -2.0, 9.0, false);
        std::stringstream ss;
        write_pattern_csv(ss, p);
        CHECK(read_pattern_csv(ss) == p);
    }
}

TEST_CASE("extreme doubles survive") {
    const double tiny = 4.9406564584124654e-324;
    const PointPattern p(1, Box::cube(1, -1.0, 1.0), {tiny, 0.1, -1.0 / 3.0}, {1e308, -tiny, 0.1 + 0.2},
                         {0.0, 1e-300, 7.0});
    std::stringstream ss;
    write_pattern_csv(ss, p);
    CHECK(read_pattern_csv(ss) == p);
}

TEST_CASE("sim_window is optional") {
    std::istringstream in("# dim=1\nx1,y,z\n0.5,1,1\n2.5,3,1\n");
    const auto p = read_pattern_csv(in);
    CHECK(p.sim_window().lo[0] == 0.5);
    CHECK(p.sim_window().hi[0] == 2.5);
    CHECK(p.size() == 2);
}

TEST_CASE("malformed input names the line") {
    std::istringstream bad("# dim=1\n# sim_window=0:3\nx1,y,z\n0.5,1,1\n0.7,abc,1\n");
    try {
        read_pattern_csv(bad, "fixture.csv");
        FAIL("expected a parse error");
    } catch (const PatternParseError& e) {
        CHECK(e.line() == 5);
        CHECK(std::string(e.what()).find("fixture.csv") != std::string::npos);
    }
    std::istringstream cols("# dim=2\n0.5,1,1\n");
    CHECK_THROWS_AS(read_pattern_csv(cols), PatternParseError);
    std::istringstream nodim("0.5,1,1\n");
    CHECK_THROWS_AS(read_pattern_csv(nodim), PatternParseError);
    std::istringstream negz("# dim=1\n0.5,1,-1\n");
    CHECK_THROWS_AS(read_pattern_csv(negz), PatternParseError);
    std::istringstream outside("# dim=1\n# sim_window=0:1\n1.5,1,1\n");
    CHECK_THROWS_AS(read_pattern_csv(outside), PatternParseError);
}

TEST_CASE("missing file is an input error") {
    CHECK_THROWS_AS(load_pattern("/nonexistent/dir/p.csv"), InputError);
}

} // TEST_SUITE
