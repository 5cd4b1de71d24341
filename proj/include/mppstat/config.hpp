#pragma once

// Experiment configuration files (JSON). The schema is documented in
// docs/config.md; parse_config rejects unknown keys and wrong types with the
// JSON path of the offending entry.

#include "mppstat/core.hpp"
#include "mppstat/sim.hpp"
#include "mppstat/weights.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mppstat::config {

enum class EstimatorKind { mu_hat_n, mu_hat_alpha, mu_hat_weighted, concat };

EstimatorKind parse_estimator(const std::string& name);
std::string to_string(EstimatorKind kind);

struct EstimatorSpec {
    EstimatorKind kind;
    weights::WeightKind weights; // equal for mu_hat_n, alpha for mu_hat_alpha
};

struct RfCovariance {
    sim::CovarianceModel cov;
};

struct OracleSettings {
    std::size_t n_mc = 0; // 0: closed forms only
    double T = 100.0;
};

struct CltSettings {
    double u = 0.0;
    std::string base_f = "first";
    bool oracle_centering = true;
    double level = 0.95;
    std::size_t n_seeds = 2000;
};

struct ExperimentConfig {
    sim::MixtureSpec spec;
    double T = 1.0;
    std::vector<Band> bands;
    MarkFunctionDescriptor f;
    std::vector<EstimatorSpec> estimators;
    std::size_t n_realizations = 1;
    std::size_t n_replicates = 1;
    std::uint64_t seed = 1;
    std::string output;
    std::optional<RfCovariance> rf_covariance;
    OracleSettings oracle;
    std::optional<CltSettings> clt;
    nlohmann::json source; // the document as read

    Window window() const { return Window::cube(spec.dim, T); }
    Box sim_window() const { return buffered_window(window(), bands); }
};

sim::MixtureSpec parse_spec(const nlohmann::json& j);
nlohmann::json spec_to_json(const sim::MixtureSpec& spec);

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

sim::CovarianceShape parse_covariance_shape(const std::string& name);

/// 64-bit FNV-1a of the compact JSON dump, as 16 hex digits.
std::string spec_hash(const nlohmann::json& spec);

/// 64-bit FNV-1a over the bit patterns of the values, as 16 hex digits.
std::string digest(const std::vector<double>& values);

} // namespace mppstat::config
