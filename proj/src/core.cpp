#include "mppstat/core.hpp"

#include "mppstat/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <unordered_map>

namespace mppstat {

namespace {

void require_dim(std::size_t expected, std::size_t got, const char* what) {
    if (expected != got) {
        throw InputError(std::string(what) + ": dimension mismatch (" + std::to_string(expected) +
                         " vs " + std::to_string(got) + ")");
    }
}

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

// Indices of points inside the estimation window, ascending.
std::vector<std::uint32_t> first_points(const PointPattern& p, const Window& win) {
    std::vector<std::uint32_t> out;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (win.contains(p.location(i))) out.push_back(static_cast<std::uint32_t>(i));
    }
    return out;
}

std::vector<PointPair> pairs_naive(const PointPattern& p, const Window& win, const Band& band) {
    std::vector<PointPair> out;
    for (std::uint32_t i : first_points(p, win)) {
        for (std::size_t j = 0; j < p.size(); ++j) {
            if (j == i) continue;
            const double d = dis(p.location(i), p.location(j));
            if (band.contains(d)) out.push_back({i, static_cast<std::uint32_t>(j), d});
        }
    }
    return out;
}

// d = 1: binary search on sorted coordinates with a slightly widened range,
// then the exact membership test on t2 - t1.
std::vector<PointPair> pairs_sorted_line(const PointPattern& p, const Window& win, const Band& band) {
    const std::size_t n = p.size();
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    const auto& x = p.coords();
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) { return x[a] < x[b]; });
    std::vector<double> sorted(n);
    for (std::size_t k = 0; k < n; ++k) sorted[k] = x[order[k]];

    std::vector<PointPair> out;
    std::vector<PointPair> row;
    for (std::uint32_t i : first_points(p, win)) {
        const double t = x[i];
        const double slack = 1e-9 * (std::abs(t) + band.reach()) + 1e-300;
        auto lo = std::lower_bound(sorted.begin(), sorted.end(), t + band.lo() - slack);
        auto hi = std::upper_bound(lo, sorted.end(), t + band.hi() + slack);
        row.clear();
        for (auto it = lo; it != hi; ++it) {
            const std::uint32_t j = order[static_cast<std::size_t>(it - sorted.begin())];
            if (j == i) continue;
            const double d = x[j] - t;
            if (band.contains(d)) row.push_back({i, j, d});
        }
        std::sort(row.begin(), row.end(), [](const PointPair& a, const PointPair& b) { return a.second < b.second; });
        out.insert(out.end(), row.begin(), row.end());
    }
    return out;
}

// d > 1: hash grid with cells slightly wider than the band's outer radius.
std::vector<PointPair> pairs_grid(const PointPattern& p, const Window& win, const Band& band) {
    const std::size_t d = p.dim();
    const double cell = band.hi() > 0.0 ? band.hi() * (1.0 + 1e-6) + 1e-300 : 1.0;
    const auto& lo = p.sim_window().lo;

    auto cell_of = [&](Coord t, std::size_t axis) {
        return static_cast<std::int64_t>(std::floor((t[axis] - lo[axis]) / cell));
    };
    auto key_of = [](std::span<const std::int64_t> c) {
        std::uint64_t h = 1469598103934665603ull;
        for (std::int64_t v : c) {
            h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        }
        return h;
    };

    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> grid;
    std::vector<std::vector<std::int64_t>> cells(p.size(), std::vector<std::int64_t>(d));
    for (std::size_t i = 0; i < p.size(); ++i) {
        for (std::size_t a = 0; a < d; ++a) cells[i][a] = cell_of(p.location(i), a);
        grid[key_of(cells[i])].push_back(static_cast<std::uint32_t>(i));
    }

    std::vector<PointPair> out;
    std::vector<PointPair> row;
    std::vector<std::int64_t> probe(d);
    std::vector<int> offset(d);
    for (std::uint32_t i : first_points(p, win)) {
        row.clear();
        std::fill(offset.begin(), offset.end(), -1);
        while (true) {
            for (std::size_t a = 0; a < d; ++a) probe[a] = cells[i][a] + offset[a];
            auto it = grid.find(key_of(probe));
            if (it != grid.end()) {
                for (std::uint32_t j : it->second) {
                    if (j == i || cells[j] != probe) continue;
                    const double dd = dis(p.location(i), p.location(j));
                    if (band.contains(dd)) row.push_back({i, j, dd});
                }
            }
            std::size_t a = 0;
            while (a < d && offset[a] == 1) offset[a++] = -1;
            if (a == d) break;
            ++offset[a];
        }
        std::sort(row.begin(), row.end(), [](const PointPair& x, const PointPair& y) { return x.second < y.second; });
        out.insert(out.end(), row.begin(), row.end());
    }
    return out;
}

} // namespace

Box Box::cube(std::size_t dim, double lo, double hi) {
    return {std::vector<double>(dim, lo), std::vector<double>(dim, hi)};
}

double Box::volume() const {
    double v = 1.0;
    for (std::size_t k = 0; k < dim(); ++k) v *= hi[k] - lo[k];
    return v;
}

bool Box::contains(Coord x) const {
    for (std::size_t k = 0; k < dim(); ++k) {
        if (x[k] < lo[k] || x[k] > hi[k]) return false;
    }
    return true;
}

Window::Window(std::vector<double> T) : Window(T, std::vector<double>(T.size(), 0.0)) {}

Window::Window(std::vector<double> T, std::vector<double> origin) : T_(std::move(T)), origin_(std::move(origin)) {
    if (T_.empty()) throw InputError("window needs at least one dimension");
    require_dim(T_.size(), origin_.size(), "window origin");
    for (double t : T_) {
        if (!(t > 0.0) || !std::isfinite(t)) throw InputError("window side lengths must be finite and > 0");
    }
    if (!all_finite(origin_)) throw InputError("window origin must be finite");
}

Window Window::cube(std::size_t dim, double T) { return Window(std::vector<double>(dim, T)); }

double Window::volume() const {
    double v = 1.0;
    for (double t : T_) v *= t;
    return v;
}

bool Window::contains(Coord x) const {
    for (std::size_t k = 0; k < dim(); ++k) {
        if (x[k] < origin_[k] || x[k] > origin_[k] + T_[k]) return false;
    }
    return true;
}

Box Window::box() const {
    Box b{origin_, origin_};
    for (std::size_t k = 0; k < dim(); ++k) b.hi[k] += T_[k];
    return b;
}

Band::Band(double lo, double hi, bool is_signed) : lo_(lo), hi_(hi), signed_(is_signed) {
    if (std::isnan(lo) || std::isnan(hi) || lo > hi) throw InputError("band requires lo <= hi");
    if (!signed_ && lo < 0.0) throw InputError("unsigned band requires lo >= 0");
    if (!std::isfinite(lo) || !std::isfinite(hi)) throw InputError("band endpoints must be finite");
}

Band Band::for_dim(std::size_t dim, double lo, double hi) { return Band(lo, hi, dim == 1); }

double Band::reach() const noexcept { return std::max(std::abs(lo_), std::abs(hi_)); }

Box buffered_window(const Window& win, std::span<const Band> bands) {
    double b = 0.0;
    for (const Band& band : bands) b = std::max(b, band.reach());
    Box box = win.box();
    for (std::size_t k = 0; k < box.dim(); ++k) {
        box.lo[k] -= b;
        box.hi[k] += b;
    }
    return box;
}

PointPattern::PointPattern(std::size_t dim, Box sim_window)
    : PointPattern(dim, std::move(sim_window), {}, {}, {}) {}

PointPattern::PointPattern(std::size_t dim, Box sim_window, std::vector<double> coords, std::vector<double> y,
                           std::vector<double> z)
    : dim_(dim), sim_window_(std::move(sim_window)), coords_(std::move(coords)), y_(std::move(y)), z_(std::move(z)) {
    validate();
}

PointPattern PointPattern::from_points(std::size_t dim, Box sim_window, std::span<const MarkedPoint> points) {
    std::vector<double> coords;
    std::vector<double> y;
    std::vector<double> z;
    coords.reserve(points.size() * dim);
    for (const MarkedPoint& p : points) {
        require_dim(dim, p.location.size(), "marked point");
        coords.insert(coords.end(), p.location.begin(), p.location.end());
        y.push_back(p.y);
        z.push_back(p.z);
    }
    return {dim, std::move(sim_window), std::move(coords), std::move(y), std::move(z)};
}

void PointPattern::validate() const {
    if (dim_ == 0) throw InputError("pattern dimension must be positive");
    require_dim(dim_, sim_window_.dim(), "simulation window");
    for (std::size_t k = 0; k < dim_; ++k) {
        if (!(sim_window_.lo[k] <= sim_window_.hi[k]) || !std::isfinite(sim_window_.lo[k]) ||
            !std::isfinite(sim_window_.hi[k])) {
            throw InputError("simulation window must be a finite box with lo <= hi");
        }
    }
    if (coords_.size() != y_.size() * dim_ || z_.size() != y_.size()) {
        throw InputError("pattern columns have inconsistent lengths");
    }
    if (!all_finite(coords_) || !all_finite(y_)) throw InputError("pattern contains non-finite values");
    for (double z : z_) {
        if (!(z >= 0.0) || !std::isfinite(z)) throw InputError("weight marks z must be finite and >= 0");
    }
    for (std::size_t i = 0; i < size(); ++i) {
        if (!sim_window_.contains(location(i))) {
            throw InputError("point " + std::to_string(i) + " lies outside the simulation window");
        }
    }
    std::vector<std::size_t> order(size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto less = [&](std::size_t a, std::size_t b) {
        auto la = location(a);
        auto lb = location(b);
        return std::lexicographical_compare(la.begin(), la.end(), lb.begin(), lb.end());
    };
    std::sort(order.begin(), order.end(), less);
    for (std::size_t k = 1; k < order.size(); ++k) {
        auto a = location(order[k - 1]);
        auto b = location(order[k]);
        if (std::equal(a.begin(), a.end(), b.begin())) {
            throw InputError("pattern is not simple: points " + std::to_string(order[k - 1]) + " and " +
                             std::to_string(order[k]) + " coincide");
        }
    }
}

MarkedPoint PointPattern::point(std::size_t i) const {
    auto loc = location(i);
    return {std::vector<double>(loc.begin(), loc.end()), y_[i], z_[i]};
}

PointPattern PointPattern::with_marks(std::vector<double> y, std::vector<double> z) const {
    return {dim_, sim_window_, coords_, std::move(y), std::move(z)};
}

std::size_t PointPattern::count_in(const Window& win) const {
    require_dim(dim_, win.dim(), "count_in");
    std::size_t n = 0;
    for (std::size_t i = 0; i < size(); ++i) n += win.contains(location(i)) ? 1 : 0;
    return n;
}

double dis(Coord t1, Coord t2) {
    require_dim(t1.size(), t2.size(), "dis");
    if (t1.empty()) throw InputError("dis: empty location");
    if (t1.size() == 1) return t2[0] - t1[0];
    double s = 0.0;
    for (std::size_t k = 0; k < t1.size(); ++k) {
        const double d = t2[k] - t1[k];
        s += d * d;
    }
    return std::sqrt(s);
}

std::vector<PointPair> enumerate_pairs(const PointPattern& pattern, const Window& win, const Band& band,
                                       PairEnumeration strategy) {
    require_dim(pattern.dim(), win.dim(), "pair enumeration window");
    if (band.is_signed() != (pattern.dim() == 1)) {
        throw InputError("band signedness must match dimension (signed iff d = 1)");
    }
    if (pattern.size() > std::numeric_limits<std::uint32_t>::max()) {
        throw InputError("pattern too large for pair enumeration");
    }
    if (strategy == PairEnumeration::naive) return pairs_naive(pattern, win, band);
    return pattern.dim() == 1 ? pairs_sorted_line(pattern, win, band) : pairs_grid(pattern, win, band);
}

std::int64_t pair_count(const PointPattern& pattern, const Window& win, const Band& band) {
    return static_cast<std::int64_t>(enumerate_pairs(pattern, win, band).size());
}

double weighted_pair_sum(const PointPattern& pattern, std::span<const PointPair> pairs, const MarkFunction& f,
                         WeightSource source) {
    double positive = 0.0;
    double negative = 0.0;
    for (const PointPair& pp : pairs) {
        const double v = f(pattern.y(pp.first), pattern.y(pp.second));
        if (!std::isfinite(v)) {
            throw NumericError("mark function '" + f.name() + "' is not finite on pair (" +
                                   std::to_string(pp.first) + ", " + std::to_string(pp.second) + ")",
                               pp.first, pp.second);
        }
        const double w = source == WeightSource::first ? pattern.z(pp.first) : pattern.z(pp.second);
        if (v >= 0.0) {
            positive += w * v;
        } else {
            negative += w * -v;
        }
    }
    return positive - negative;
}

double weighted_pair_sum(const PointPattern& pattern, const Window& win, const Band& band, const MarkFunction& f,
                         WeightSource source) {
    const auto pairs = enumerate_pairs(pattern, win, band);
    return weighted_pair_sum(pattern, pairs, f, source);
}

PointPattern translate(const PointPattern& pattern, Coord x) {
    require_dim(pattern.dim(), x.size(), "translate");
    std::vector<double> coords = pattern.coords();
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        for (std::size_t k = 0; k < x.size(); ++k) coords[i * x.size() + k] -= x[k];
    }
    Box w = pattern.sim_window();
    for (std::size_t k = 0; k < x.size(); ++k) {
        w.lo[k] -= x[k];
        w.hi[k] -= x[k];
    }
    return {pattern.dim(), std::move(w), std::move(coords), pattern.ys(), pattern.zs()};
}

Window translate(const Window& win, Coord x) {
    require_dim(win.dim(), x.size(), "translate");
    std::vector<double> origin = win.origin();
    for (std::size_t k = 0; k < x.size(); ++k) origin[k] -= x[k];
    return Window(win.T(), std::move(origin));
}

} // namespace mppstat
