#pragma once

// Point-pattern data model, window geometry, distance bands and exact
// ordered-pair enumeration. Every estimator in the library is built on
// for_each_pair().

#include "mppstat/markfn.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace mppstat {

using Coord = std::span<const double>;

struct MarkedPoint {
    std::vector<double> location;
    double y = 0.0;
    double z = 1.0;
};

/// Axis-aligned box [lo, hi] (closed).
struct Box {
    std::vector<double> lo;
    std::vector<double> hi;

    static Box cube(std::size_t dim, double lo, double hi);

    std::size_t dim() const noexcept { return lo.size(); }
    double volume() const;
    bool contains(Coord x) const;
    bool operator==(const Box&) const = default;
};

/// Estimation window [origin, origin + T]. The origin defaults to zero; it
/// only moves when a pattern and its window are translated together.
class Window {
public:
    explicit Window(std::vector<double> T);
    Window(std::vector<double> T, std::vector<double> origin);

    static Window cube(std::size_t dim, double T);

    std::size_t dim() const noexcept { return T_.size(); }
    const std::vector<double>& T() const noexcept { return T_; }
    const std::vector<double>& origin() const noexcept { return origin_; }
    double volume() const;
    bool contains(Coord x) const;
    Box box() const;

private:
    std::vector<double> T_;
    std::vector<double> origin_;
};

/// Distance set I. Signed bands (d = 1) test t2 - t1 in [lo, hi]; unsigned
/// bands (d > 1) test |t2 - t1| in [lo, hi]. Endpoints are closed.
class Band {
public:
    Band(double lo, double hi, bool is_signed);

    /// Signed for d = 1, unsigned otherwise.
    static Band for_dim(std::size_t dim, double lo, double hi);

    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }
    bool is_signed() const noexcept { return signed_; }
    bool contains(double distance) const noexcept { return distance >= lo_ && distance <= hi_; }
    /// Largest absolute separation a member pair can have.
    double reach() const noexcept;
    bool operator==(const Band&) const = default;

private:
    double lo_;
    double hi_;
    bool signed_;
};

/// Simulation window [origin - b, origin + T + b] with b the widest reach among
/// `bands`, so that every neighbourhood of a point in the estimation window is
/// fully observed.
Box buffered_window(const Window& win, std::span<const Band> bands);

/// A finite, simple marked point pattern observed on `sim_window`.
/// Stored column-wise: coordinates are row-major (point, axis).
class PointPattern {
public:
    PointPattern(std::size_t dim, Box sim_window);
    PointPattern(std::size_t dim, Box sim_window, std::vector<double> coords, std::vector<double> y,
                 std::vector<double> z);

    static PointPattern from_points(std::size_t dim, Box sim_window, std::span<const MarkedPoint> points);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return y_.size(); }
    bool empty() const noexcept { return y_.empty(); }
    const Box& sim_window() const noexcept { return sim_window_; }

    Coord location(std::size_t i) const { return {coords_.data() + i * dim_, dim_}; }
    double y(std::size_t i) const { return y_[i]; }
    double z(std::size_t i) const { return z_[i]; }
    const std::vector<double>& coords() const noexcept { return coords_; }
    const std::vector<double>& ys() const noexcept { return y_; }
    const std::vector<double>& zs() const noexcept { return z_; }
    MarkedPoint point(std::size_t i) const;

    /// Same locations and window, new marks.
    PointPattern with_marks(std::vector<double> y, std::vector<double> z) const;

    /// Number of points inside an estimation window.
    std::size_t count_in(const Window& win) const;

    bool operator==(const PointPattern&) const = default;

private:
    void validate() const;

    std::size_t dim_;
    Box sim_window_;
    std::vector<double> coords_;
    std::vector<double> y_;
    std::vector<double> z_;
};

/// Signed difference t2 - t1 for d = 1, Euclidean norm of t2 - t1 otherwise.
double dis(Coord t1, Coord t2);

enum class PairEnumeration { automatic, naive };

struct PointPair {
    std::uint32_t first;
    std::uint32_t second;
    double distance;
};

/// All ordered pairs (p1, p2), p1 != p2, with p1 inside `win` and
/// dis(p1, p2) in `band`; p2 ranges over the whole pattern.
/// Pairs come out sorted by (first, second) whatever the strategy, so sums
/// accumulated over them are reproducible bit-for-bit.
std::vector<PointPair> enumerate_pairs(const PointPattern& pattern, const Window& win, const Band& band,
                                       PairEnumeration strategy = PairEnumeration::automatic);

std::int64_t pair_count(const PointPattern& pattern, const Window& win, const Band& band);

/// Whose z multiplies f(y1, y2). `second` exists for the time-reversal
/// identity on signed bands.
enum class WeightSource { first, second };

/// Sum over qualifying ordered pairs of z1 * f(y1, y2). Signed f is split as
/// f_+ - f_-, each part accumulated separately.
double weighted_pair_sum(const PointPattern& pattern, const Window& win, const Band& band,
                         const MarkFunction& f, WeightSource source = WeightSource::first);

/// Same sum over a precomputed pair list.
double weighted_pair_sum(const PointPattern& pattern, std::span<const PointPair> pairs,
                         const MarkFunction& f, WeightSource source = WeightSource::first);

/// Shift operator T_x: every location t becomes t - x, window included.
PointPattern translate(const PointPattern& pattern, Coord x);
Window translate(const Window& win, Coord x);

} // namespace mppstat
