#pragma once

#include "mppstat/core.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <vector>

namespace testutil {

using mppstat::Box;
using mppstat::PointPattern;

/// Random simple pattern on [lo, hi]^dim. Coordinates are multiples of
/// 2^-10, so shifts by other dyadic values are exact.
inline PointPattern random_pattern(std::mt19937_64& rng, std::size_t dim, std::size_t n, double lo, double hi,
                                   bool dyadic = true) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::normal_distribution<double> mark(1.0, 2.0);
    std::uniform_real_distribution<double> zdist(0.0, 3.0);
    std::set<std::vector<double>> seen;
    std::vector<double> coords;
    std::vector<double> y;
    std::vector<double> z;
    while (y.size() < n) {
        std::vector<double> p(dim);
        for (auto& c : p) {
            c = u(rng);
            if (dyadic) c = std::ldexp(std::floor(std::ldexp(c, 10)), -10);
            c = std::clamp(c, lo, hi);
        }
        if (!seen.insert(p).second) continue;
        coords.insert(coords.end(), p.begin(), p.end());
        y.push_back(mark(rng));
        z.push_back(zdist(rng));
    }
    return PointPattern(dim, Box::cube(dim, lo, hi), std::move(coords), std::move(y), std::move(z));
}

inline bool rel_close(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

} // namespace testutil
