#pragma once

// Experiment runner behind the mppstat executable.
//
// Exit codes: 0 success, 1 some estimate was undefined, 2 bad input or I/O.

#include "mppstat/config.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

namespace mppstat::cli {

struct EstimateOptions {
    std::optional<weights::WeightKind> weights; // overrides weighted estimators
    std::optional<sim::CovarianceModel> cov;    // for rfvar; falls back to the config
    bool timing = false;
    unsigned threads = 0;
};

/// Writes pattern_NNNNN.csv per realization of the given replicate plus
/// manifest.json. Replicate r uses seed derive_seed(cfg.seed, r).
void cmd_simulate(const config::ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                  std::size_t replicate = 0, unsigned threads = 0);

/// Results CSV, one row per (replicate, band, estimator). With `patterns`
/// set, estimates a single replicate read from that directory instead of
/// simulating. Returns 1 when some value is undefined, else 0.
int cmd_estimate(const config::ExperimentConfig& cfg, const std::optional<std::filesystem::path>& patterns,
                 std::ostream& out, const EstimateOptions& options);

/// Per-seed CLT statistics and a summary. With out_dir set, writes
/// clt_seeds.csv and clt_summary.csv there; the summary also goes to `out`.
int cmd_infer_clt(const config::ExperimentConfig& cfg, const std::optional<std::filesystem::path>& out_dir,
                  std::ostream& out, unsigned threads = 0);

/// summary.csv (bias, RMSE, variance, coverage per estimator) and plot.gp.
void cmd_report(const std::filesystem::path& results, const std::filesystem::path& out_dir);

/// Reads the config stored in a simulate manifest.
config::ExperimentConfig config_from_manifest(const std::filesystem::path& pattern_dir);

int run(int argc, char** argv);

} // namespace mppstat::cli
