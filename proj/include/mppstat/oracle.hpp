#pragma once

// Reference values of the first- and second-order mean marks of finite
// mixtures: closed forms per class, and a Monte Carlo fallback that shares
// nothing with the closed forms except the simulators.

#include "mppstat/core.hpp"
#include "mppstat/sim.hpp"

#include <cstdint>
#include <optional>

namespace mppstat::oracle {

enum class Order { first = 1, second = 2 };

/// Per-class ingredients of the mixture formulas for one f and band.
struct ClassMoments {
    double intensity;      // λ_k
    double pair_intensity; // expected ordered pairs per unit volume with separation in the band
    double mark_mean_f;    // class mean of f, pair-weighted over the band for order 2
    double z_mean;
};

/// Throws UnsupportedSpecError when the class has no analytic moments
/// (hardcore ground with a separation-dependent mark mean, grid ground in
/// d > 1 at order 2).
ClassMoments class_moments(const sim::MixtureClass& cls, std::size_t dim, const MarkFunction& f, Order order,
                           const std::optional<Band>& band);

/// Σ p_k z̄_k α_k μ_k / Σ p_k z̄_k α_k, with α_k = λ_k (order 1) or the class
/// pair intensity over the band (order 2).
double closed_form_mu(const sim::MixtureSpec& spec, const MarkFunction& f, Order order,
                      const std::optional<Band>& band = std::nullopt);

/// Σ p_k μ_k.
double closed_form_mu_tilde(const sim::MixtureSpec& spec, const MarkFunction& f, Order order,
                            const std::optional<Band>& band = std::nullopt);

/// Mean of f(y1, y2) for a class at separation r (signed in d = 1).
double pointwise_mark_mean(const sim::MixtureClass& cls, const MarkFunction& f, double r);

/// Ordered-pair density of the class ground at separation r: per unit volume
/// and unit r. Grid grounds without jitter have atoms and are rejected.
double pair_density(const sim::GroundSpec& ground, std::size_t dim, double r);

/// Σ p_k ∫_I μ_k(r) dα_k(r) / α_k(I), integrating the pointwise mark mean
/// against the pair density instead of using the band closed forms.
double smoothed_mu_tilde(const sim::MixtureSpec& spec, const MarkFunction& f, const Band& band);

struct BruteForceOptions {
    enum class Mode { pooled, ratio_average };

    std::size_t n_mc = 1000;
    std::uint64_t seed = 1;
    double T = 100.0;
    Mode mode = Mode::pooled;
    unsigned threads = 0;
};

struct BruteForceResult {
    double value;
    double standard_error; // jackknife over realizations
    std::size_t n_used;
};

/// Simulates n_mc realizations on a buffered cube of side T. Pooled mode sums
/// numerators and denominators over all realizations (targets mu);
/// ratio_average averages per-realization ratios (targets mu_tilde).
BruteForceResult brute_force_mu(const sim::MixtureSpec& spec, const MarkFunction& f, Order order,
                                const std::optional<Band>& band, const BruteForceOptions& options = {});

/// Marginal law of a single mark.
sim::MarkDistribution marginal(const sim::MarkSpec& marks);

/// E[f(Y) - u | f(Y) > u] and P(f(Y) > u) for a first-only f.
double conditional_excess_mean(const sim::MarkDistribution& dist, const MarkFunction& f, double u);
double exceedance_probability(const sim::MarkDistribution& dist, const MarkFunction& f, double u);

} // namespace mppstat::oracle
