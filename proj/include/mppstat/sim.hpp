#pragma once

// Generators for ergodic and finite-mixture (non-ergodic) marked point
// processes. Every generator is a pure function of (spec, window, seed).

#include "mppstat/core.hpp"

#include <Eigen/SparseCholesky>

#include <cstdint>
#include <random>
#include <variant>
#include <vector>

namespace mppstat::sim {

using Rng = std::mt19937_64;

/// seed xor splitmix64(index): independent streams per realization.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

// ---------------------------------------------------------------- ground

struct PoissonGround {
    double intensity;
};

/// Matérn type II: a point survives iff no proposal with an earlier birth
/// time lies closer than min_dist.
struct HardcoreGround {
    double proposal_intensity;
    double min_dist;
};

/// Lattice of the given spacing anchored at the window's lower corner, each
/// node jittered uniformly in [-jitter, jitter]^d. Nodes that leave the window
/// are dropped.
struct GridGround {
    double spacing;
    double jitter = 0.0;
};

using GroundSpec = std::variant<PoissonGround, HardcoreGround, GridGround>;

/// Flat row-major list of locations.
struct Locations {
    std::size_t dim = 1;
    std::vector<double> coords;

    std::size_t size() const noexcept { return dim == 0 ? 0 : coords.size() / dim; }
    Coord at(std::size_t i) const { return {coords.data() + i * dim, dim}; }
};

double unit_ball_volume(std::size_t dim);

/// (1 - exp(-λp V d0^d)) / (V d0^d)
double matern2_retained_intensity(double proposal_intensity, double min_dist, std::size_t dim);

/// Expected number of points per unit volume for a ground spec.
double ground_intensity(const GroundSpec& spec, std::size_t dim);

/// Locations sorted lexicographically.
Locations sample_ground(const GroundSpec& spec, const Box& sim_window, std::uint64_t seed);

// ---------------------------------------------------------------- marks

struct NormalMarks {
    double mean;
    double sd;
};
struct UniformMarks {
    double a;
    double b;
};
struct ConstantMarks {
    double c;
};
using MarkDistribution = std::variant<NormalMarks, UniformMarks, ConstantMarks>;

struct IidMarks {
    MarkDistribution dist;
};

enum class CovarianceShape { spherical, truncated_exponential };

/// Finite-range covariance C(h), zero for h > range.
///   spherical:             σ²(1 - 1.5 h/r + 0.5 (h/r)³) on [0, r]
///   truncated_exponential: σ² exp(-3h/r) on [0, r]  (jumps to 0 at r)
struct CovarianceModel {
    CovarianceShape shape = CovarianceShape::spherical;
    double variance = 1.0;
    double range = 1.0;

    double operator()(double h) const;
};

struct GaussianFieldMarks {
    double mean;
    CovarianceModel cov;
};

using MarkSpec = std::variant<IidMarks, GaussianFieldMarks>;

struct UnitZ {};
struct ConstantZ {
    double value;
};
struct UniformZ {
    double a;
    double b;
};
using ZRule = std::variant<UnitZ, ConstantZ, UniformZ>;

struct Marks {
    std::vector<double> y;
    std::vector<double> z;
};

/// Draws one joint Gaussian vector at fixed locations. The covariance matrix
/// is factorised once (sparse, thanks to the finite range) and reused.
class GaussianFieldSampler {
public:
    GaussianFieldSampler(const Locations& locations, const GaussianFieldMarks& spec);

    std::vector<double> draw(Rng& rng) const;

    /// Diagonal jitter that had to be added for the factorisation to succeed.
    double jitter() const noexcept { return jitter_; }
    std::size_t size() const noexcept { return order_.size(); }

private:
    double mean_;
    double jitter_ = 0.0;
    std::vector<std::size_t> order_; // factorisation order -> location index
    Eigen::SparseMatrix<double> lower_;
};

Marks sample_marks(const Locations& locations, const MarkSpec& spec, std::uint64_t seed,
                   const ZRule& z_rule = UnitZ{});

// ---------------------------------------------------------------- mixtures

struct MixtureClass {
    double p;
    GroundSpec ground;
    MarkSpec marks;
    ZRule z = UnitZ{};
};

struct MixtureSpec {
    std::size_t dim = 1;
    std::vector<MixtureClass> classes;

    /// Throws InputError unless the class list is non-empty, every p_k > 0,
    /// the probabilities sum to 1 within 1e-12, and all parameters are sane.
    void validate() const;
};

struct Realization {
    PointPattern pattern;
    std::size_t class_index;
    std::uint64_t seed;
};

PointPattern sample_class(const MixtureClass& cls, const Box& sim_window, std::uint64_t seed);

/// Draws the class from the realization's own stream, then ground and marks.
Realization sample_realization(const MixtureSpec& spec, const Box& sim_window, std::uint64_t seed);

/// Realization i uses derive_seed(seed, i).
std::vector<Realization> sample_mixture(const MixtureSpec& spec, const Box& sim_window, std::size_t n_realizations,
                                        std::uint64_t seed, unsigned threads = 0);

} // namespace mppstat::sim
