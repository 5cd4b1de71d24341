#include "mppstat/cli.hpp"

#include "mppstat/error.hpp"
#include "mppstat/est.hpp"
#include "mppstat/infer.hpp"
#include "mppstat/log.hpp"
#include "mppstat/oracle.hpp"
#include "mppstat/parallel.hpp"
#include "mppstat/pattern_io.hpp"
#include "mppstat/stats.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

namespace mppstat::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Stream reserved for Monte Carlo oracle runs, far from replicate indices.
constexpr std::uint64_t kOracleStream = 0x6f7261636c65ULL;

std::string num(double v) { return std::isnan(v) ? std::string() : format_double(v); }

std::string pattern_name(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "pattern_%05zu.csv", i);
    return buf;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    return out;
}

struct Oracle {
    double mu = kNaN;
    double mu_tilde = kNaN;
    double se = kNaN;
};

Oracle oracle_for(const config::ExperimentConfig& cfg, const MarkFunction& f, const Band& band, unsigned threads) {
    Oracle o;
    try {
        o.mu = oracle::closed_form_mu(cfg.spec, f, oracle::Order::second, band);
    } catch (const UnsupportedSpecError&) {
    }
    try {
        o.mu_tilde = oracle::closed_form_mu_tilde(cfg.spec, f, oracle::Order::second, band);
    } catch (const UnsupportedSpecError&) {
    }
    if ((std::isnan(o.mu) || std::isnan(o.mu_tilde)) && cfg.oracle.n_mc > 0) {
        oracle::BruteForceOptions opt;
        opt.n_mc = cfg.oracle.n_mc;
        opt.T = cfg.oracle.T;
        opt.seed = sim::derive_seed(cfg.seed, kOracleStream);
        opt.threads = threads;
        if (std::isnan(o.mu)) {
            const auto r = oracle::brute_force_mu(cfg.spec, f, oracle::Order::second, band, opt);
            o.mu = r.value;
            o.se = r.standard_error;
        }
        if (std::isnan(o.mu_tilde)) {
            opt.mode = oracle::BruteForceOptions::Mode::ratio_average;
            o.mu_tilde = oracle::brute_force_mu(cfg.spec, f, oracle::Order::second, band, opt).value;
        }
    }
    if (std::isnan(o.mu) || std::isnan(o.mu_tilde)) {
        warn("no closed-form oracle for band [" + format_double(band.lo()) + ", " + format_double(band.hi()) +
             "]; set oracle.n_mc to run the Monte Carlo oracle");
    }
    return o;
}

weights::WeightStrategy strategy_for(weights::WeightKind kind, const config::ExperimentConfig& cfg,
                                     const EstimateOptions& options) {
    switch (kind) {
    case weights::WeightKind::equal: return weights::WeightStrategy::equal();
    case weights::WeightKind::alpha_pairs: return weights::WeightStrategy::alpha_pairs();
    case weights::WeightKind::count_based: return weights::WeightStrategy::count_based();
    case weights::WeightKind::rf_conditional_variance: {
        std::optional<sim::CovarianceModel> cov = options.cov;
        if (!cov && cfg.rf_covariance) cov = cfg.rf_covariance->cov;
        if (!cov) throw InputError("rfvar weights need --cov-model and --cov-params (or rf_covariance in the config)");
        return weights::WeightStrategy::rf_conditional_variance(*cov, cov->variance);
    }
    case weights::WeightKind::custom: break;
    }
    throw InputError("custom weights are not available from the command line");
}

struct Loaded {
    std::vector<PointPattern> patterns;
    std::uint64_t seed;
};

Loaded load_pattern_dir(const fs::path& dir) {
    const fs::path manifest = dir / "manifest.json";
    Loaded out{{}, 0};
    if (fs::exists(manifest)) {
        std::ifstream in(manifest);
        json m;
        try {
            m = json::parse(in);
        } catch (const json::parse_error& e) {
            throw InputError(manifest.string() + " is not valid JSON: " + e.what());
        }
        out.seed = m.value("replicate_seed", std::uint64_t{0});
        for (const auto& r : m.at("realizations")) out.patterns.push_back(load_pattern(dir / r.at("file").get<std::string>()));
        return out;
    }
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.path().extension() == ".csv") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw InputError("no pattern files in " + dir.string());
    for (const auto& f : files) out.patterns.push_back(load_pattern(f));
    return out;
}

/// Splits one CSV line; fields never contain commas or quotes here.
std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(line);
    while (std::getline(ss, cur, ',')) out.push_back(cur);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_field(const std::string& s) {
    if (s.empty()) return kNaN;
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw InputError("bad number '" + s + "'");
        return v;
    } catch (const std::logic_error&) {
        if (s == "nan") return kNaN;
        throw InputError("bad number '" + s + "'");
    }
}

const char* kResultsHeader =
    "estimator,weights,band_lo,band_hi,replicate,value,pair_count,exclusions,weights_digest,seed,runtime_ms,target,"
    "oracle_mu,oracle_mu_tilde,oracle_se,ci_lo,ci_hi";

} // namespace

void cmd_simulate(const config::ExperimentConfig& cfg, const fs::path& out_dir, std::size_t replicate,
                  unsigned threads) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw InputError("cannot create " + out_dir.string() + ": " + ec.message());
    const std::uint64_t seed = sim::derive_seed(cfg.seed, replicate);
    const auto reals = sim::sample_mixture(cfg.spec, cfg.sim_window(), cfg.n_realizations, seed, threads);
    json list = json::array();
    for (std::size_t i = 0; i < reals.size(); ++i) {
        const std::string name = pattern_name(i);
        save_pattern(out_dir / name, reals[i].pattern);
        list.push_back({{"file", name}, {"class_index", reals[i].class_index}, {"seed", reals[i].seed}});
    }
    const json manifest = {{"seed", cfg.seed},
                           {"replicate", replicate},
                           {"replicate_seed", seed},
                           {"spec_hash", config::spec_hash(config::spec_to_json(cfg.spec))},
                           {"realizations", list},
                           {"config", cfg.source}};
    auto out = open_out(out_dir / "manifest.json");
    out << manifest.dump(2) << '\n';
    if (!out) throw InputError("failed writing " + (out_dir / "manifest.json").string());
}

config::ExperimentConfig config_from_manifest(const fs::path& pattern_dir) {
    const fs::path path = pattern_dir / "manifest.json";
    std::ifstream in(path);
    if (!in) throw InputError("no --config given and " + path.string() + " is missing");
    try {
        return config::parse_config(json::parse(in).at("config"));
    } catch (const json::exception& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

int cmd_estimate(const config::ExperimentConfig& cfg_in, const std::optional<fs::path>& patterns, std::ostream& out,
                 const EstimateOptions& options) {
    config::ExperimentConfig cfg = cfg_in;
    if (options.weights) {
        bool found = false;
        for (auto& e : cfg.estimators) {
            if (e.kind == config::EstimatorKind::mu_hat_weighted || e.kind == config::EstimatorKind::concat) {
                e.weights = *options.weights;
                found = true;
            }
        }
        if (!found) cfg.estimators.push_back({config::EstimatorKind::mu_hat_weighted, *options.weights});
    }
    const MarkFunction f = MarkFunctionRegistry::with_builtins().make(cfg.f);
    const Window win = cfg.window();
    const std::span<const Window> windows(&win, 1);
    const double z975 = stats::normal_quantile(0.975);

    std::vector<Oracle> oracles;
    for (const Band& band : cfg.bands) oracles.push_back(oracle_for(cfg, f, band, options.threads));

    out << kResultsHeader << '\n';
    bool undefined = false;
    const std::size_t replicates = patterns ? 1 : cfg.n_replicates;
    for (std::size_t rep = 0; rep < replicates; ++rep) {
        std::vector<PointPattern> pats;
        std::uint64_t seed = sim::derive_seed(cfg.seed, rep);
        if (patterns) {
            Loaded l = load_pattern_dir(*patterns);
            pats = std::move(l.patterns);
            seed = l.seed;
        } else {
            auto reals = sim::sample_mixture(cfg.spec, cfg.sim_window(), cfg.n_realizations, seed, options.threads);
            for (auto& r : reals) pats.push_back(std::move(r.pattern));
        }
        for (std::size_t b = 0; b < cfg.bands.size(); ++b) {
            const Band& band = cfg.bands[b];
            const auto sums = est::pair_sums(pats, windows, band, f, options.threads);
            for (const auto& e : cfg.estimators) {
                const auto t0 = std::chrono::steady_clock::now();
                std::vector<double> w = weights::compute_weights(strategy_for(e.weights, cfg, options), pats,
                                                                 windows, band);
                std::size_t excluded = 0;
                for (std::size_t i = 0; i < w.size(); ++i) {
                    if (!sums[i].defined()) {
                        w[i] = 0.0;
                        ++excluded;
                    }
                }
                est::EstimateResult res = est::EstimateResult::undefined(band);
                double se = kNaN;
                const bool any = std::any_of(w.begin(), w.end(), [](double x) { return x > 0.0; });
                if (e.kind == config::EstimatorKind::mu_hat_n) {
                    res = est::combine_equal(sums, band);
                    se = est::jackknife_se(sums, {});
                } else if (any && e.kind == config::EstimatorKind::concat) {
                    const auto c = est::concat_patterns(pats, windows, band, w);
                    res = est::mu_hat(c.pattern, c.window, band, f);
                    se = est::jackknife_se(sums, w);
                } else if (any) {
                    res = est::combine_weighted(sums, w, band);
                    se = est::jackknife_se(sums, w);
                }
                const double ms =
                    options.timing
                        ? std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count()
                        : 0.0;
                undefined = undefined || !res.defined;
                std::int64_t pairs = 0;
                for (const auto& s : sums) pairs += s.pairs;
                const double value = res.defined ? res.value : kNaN;
                const double half = z975 * se;
                const std::string target =
                    e.kind == config::EstimatorKind::mu_hat_n
                        ? "mu_tilde"
                        : weights::conformance(e.weights, cfg.spec).target;
                out << config::to_string(e.kind) << ',' << weights::to_string(e.weights) << ','
                    << format_double(band.lo()) << ',' << format_double(band.hi()) << ',' << rep << ','
                    << num(value) << ',' << pairs << ',' << excluded << ',' << config::digest(w) << ',' << seed
                    << ',' << format_double(ms) << ',' << target << ',' << num(oracles[b].mu) << ','
                    << num(oracles[b].mu_tilde) << ',' << num(oracles[b].se) << ',' << num(value - half) << ','
                    << num(value + half) << '\n';
            }
        }
    }
    if (!out) throw InputError("failed writing results");
    return undefined ? 1 : 0;
}

int cmd_infer_clt(const config::ExperimentConfig& cfg, const std::optional<fs::path>& out_dir, std::ostream& out,
                  unsigned threads) {
    if (!cfg.clt) throw InputError("config has no clt section");
    if (cfg.spec.dim != 1) throw InputError("CLT inference supports d = 1 only");
    const config::CltSettings& s = *cfg.clt;
    const MarkFunction base = builtin(s.base_f);
    const infer::CltConfig clt{cfg.bands.front(), base, s.u};
    const ThresholdFamily fam = threshold(base, s.u);

    double center = kNaN;
    if (s.oracle_centering) {
        if (cfg.spec.classes.size() == 1) {
            center = oracle::conditional_excess_mean(oracle::marginal(cfg.spec.classes[0].marks), base, s.u);
        } else {
            try {
                center = oracle::closed_form_mu(cfg.spec, fam.excess_function(), oracle::Order::second, clt.band) /
                         oracle::closed_form_mu(cfg.spec, fam.indicator_function(), oracle::Order::second, clt.band);
            } catch (const UnsupportedSpecError& e) {
                throw InputError(std::string("oracle centering unavailable (") + e.what() +
                                 "); use \"centering\": \"plug_in\"");
            }
        }
    }
    const Window win = cfg.window();
    const auto reals =
        sim::sample_mixture(cfg.spec, cfg.sim_window(), s.n_seeds, sim::derive_seed(cfg.seed, 0), threads);
    std::vector<PointPattern> pats;
    pats.reserve(reals.size());
    for (const auto& r : reals) pats.push_back(r.pattern);
    const auto centering = s.oracle_centering ? infer::Centering::oracle(center) : infer::Centering::plug_in();
    auto results = infer::clt_statistics(pats, std::span<const Window>(&win, 1), clt, centering, threads);
    const double T = win.volume();

    std::vector<infer::CltResult> defined;
    for (const auto& r : results) {
        if (r.defined) defined.push_back(r);
    }
    if (defined.size() < 30) throw InputError("fewer than 30 realizations have pairs above the threshold");
    const infer::SEstimate se = infer::estimate_s(defined, T);

    std::vector<double> stat;
    std::size_t covered = 0;
    for (auto& r : results) {
        if (!r.defined) continue;
        infer::attach_interval(r, se.s_hat, T, s.level);
        stat.push_back(r.centered_stat);
        if (s.oracle_centering && r.ci_lo <= center && center <= r.ci_hi) ++covered;
    }
    const double m = stats::mean(stat);
    const double sd = std::sqrt(stats::variance(stat));
    const stats::KsResult ks = sd > 0.0 ? stats::ks_normal(stat, m, sd) : stats::KsResult{kNaN, kNaN};
    const double coverage = s.oracle_centering ? static_cast<double>(covered) / static_cast<double>(stat.size()) : kNaN;

    std::ostringstream summary;
    summary << "n,center,s_hat,lambda_u_hat,ks_statistic,ks_p_value,skewness,excess_kurtosis,coverage,level,u\n"
            << stat.size() << ',' << num(center) << ',' << num(se.s_hat) << ',' << num(se.lambda_u_hat) << ','
            << num(ks.statistic) << ',' << num(ks.p_value) << ',' << num(stats::skewness(stat)) << ','
            << num(stats::excess_kurtosis(stat)) << ',' << num(coverage) << ',' << num(s.level) << ','
            << num(s.u) << '\n';
    out << summary.str();

    if (out_dir) {
        std::error_code ec;
        fs::create_directories(*out_dir, ec);
        if (ec) throw InputError("cannot create " + out_dir->string() + ": " + ec.message());
        auto seeds = open_out(*out_dir / "clt_seeds.csv");
        seeds << "index,seed,class_index,defined,centered_stat,alpha_star,cond_count,lambda_u_hat,mu_point,center,"
                 "ci_lo,ci_hi\n";
        for (std::size_t i = 0; i < results.size(); ++i) {
            const auto& r = results[i];
            seeds << i << ',' << reals[i].seed << ',' << reals[i].class_index << ',' << (r.defined ? 1 : 0) << ','
                  << num(r.centered_stat) << ',' << num(r.alpha_star) << ',' << num(r.cond_count) << ','
                  << num(r.lambda_u_hat) << ',' << num(r.mu_point) << ',' << num(r.center) << ','
                  << (r.defined ? num(r.ci_lo) : "") << ',' << (r.defined ? num(r.ci_hi) : "") << '\n';
        }
        auto sum = open_out(*out_dir / "clt_summary.csv");
        sum << summary.str();
    }
    return defined.size() == results.size() ? 0 : 1;
}

void cmd_report(const fs::path& results, const fs::path& out_dir) {
    std::ifstream in(results);
    if (!in) throw InputError("cannot open results file " + results.string());
    std::string line;
    if (!std::getline(in, line)) throw InputError(results.string() + " is empty");
    const auto header = split(line);
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
    for (const char* required : {"estimator", "weights", "band_lo", "band_hi", "value"}) {
        if (!col.count(required)) throw InputError(results.string() + ": missing column '" + required + "'");
    }
    const bool has_oracle = col.count("target") && col.count("oracle_mu") && col.count("oracle_mu_tilde");
    const bool has_ci = col.count("ci_lo") && col.count("ci_hi");
    if (!has_oracle) warn("results have no oracle columns; bias, RMSE and coverage are omitted");

    struct Group {
        std::string key;
        std::string target;
        double oracle = kNaN;
        std::vector<double> values;
        std::size_t covered = 0;
        std::size_t with_ci = 0;
    };
    std::vector<Group> groups;
    std::map<std::string, std::size_t> index;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto fields = split(line);
        if (fields.size() != header.size()) {
            throw InputError(results.string() + ":" + std::to_string(lineno) + ": expected " +
                             std::to_string(header.size()) + " fields");
        }
        const auto get = [&](const char* name) { return fields[col.at(name)]; };
        const std::string key = get("estimator") + ',' + get("weights") + ',' + get("band_lo") + ',' + get("band_hi");
        auto [it, fresh] = index.emplace(key, groups.size());
        if (fresh) groups.push_back({key, "", kNaN, {}, 0, 0});
        Group& g = groups[it->second];
        double value;
        try {
            value = parse_field(get("value"));
        } catch (const InputError& e) {
            throw InputError(results.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
        if (std::isnan(value)) continue;
        g.values.push_back(value);
        if (has_oracle) {
            g.target = get("target");
            g.oracle = parse_field(get(g.target == "mu" ? "oracle_mu" : "oracle_mu_tilde"));
            if (has_ci && !std::isnan(g.oracle)) {
                const double lo = parse_field(get("ci_lo"));
                const double hi = parse_field(get("ci_hi"));
                if (!std::isnan(lo) && !std::isnan(hi)) {
                    ++g.with_ci;
                    if (lo <= g.oracle && g.oracle <= hi) ++g.covered;
                }
            }
        }
    }

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw InputError("cannot create " + out_dir.string() + ": " + ec.message());
    auto out = open_out(out_dir / "summary.csv");
    out << "estimator,weights,band_lo,band_hi,n,mean,variance,target,oracle,bias,rmse,coverage\n";
    for (const Group& g : groups) {
        const double m = stats::mean(g.values);
        double rmse = kNaN;
        if (!std::isnan(g.oracle) && !g.values.empty()) {
            double ss = 0.0;
            for (double v : g.values) ss += (v - g.oracle) * (v - g.oracle);
            rmse = std::sqrt(ss / static_cast<double>(g.values.size()));
        }
        const double cov = g.with_ci > 0 ? static_cast<double>(g.covered) / static_cast<double>(g.with_ci) : kNaN;
        out << g.key << ',' << g.values.size() << ',' << num(m) << ',' << num(stats::variance(g.values)) << ','
            << g.target << ',' << num(g.oracle) << ',' << num(m - g.oracle) << ',' << num(rmse) << ',' << num(cov)
            << '\n';
    }
    auto plot = open_out(out_dir / "plot.gp");
    plot << "# gnuplot -persist plot.gp\n"
            "set datafile separator ','\n"
            "set key autotitle columnhead\n"
            "set ylabel 'estimate'\n"
            "set xtics rotate by -45\n"
            "set style fill solid 0.4\n"
            "plot 'summary.csv' using 0:6:(sqrt($7)):xtic(1) with yerrorbars title 'mean +/- sd', \\\n"
            "     '' using 0:9 with points pt 7 title 'oracle'\n";
}

int run(int argc, char** argv) {
    CLI::App app{"mppstat: mean-mark estimation for marked point processes"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::string patterns_dir;
    std::string results_path;
    std::string weights_name;
    std::string cov_model;
    std::string cov_params;
    std::optional<std::uint64_t> seed;
    unsigned threads = 0;
    std::size_t replicate = 0;
    bool timing = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--seed", seed, "master seed (overrides the config)");
        cmd->add_option("--threads", threads, "worker cap (default: MPPSTAT_THREADS or all cores)");
    };

    auto* simulate = app.add_subcommand("simulate", "write simulated patterns and a manifest");
    simulate->add_option("--config", config_path, "experiment config (JSON)")->required();
    simulate->add_option("--out", out_path, "output directory")->required();
    simulate->add_option("--replicate", replicate, "replicate index to simulate");
    add_common(simulate);

    auto* estimate = app.add_subcommand("estimate", "estimate mean marks and write a results CSV");
    estimate->add_option("--config", config_path, "experiment config (JSON)");
    estimate->add_option("--patterns", patterns_dir, "estimate patterns from this directory instead of simulating");
    estimate->add_option("--out", out_path, "results CSV (default: config output, else stdout)");
    estimate->add_option("--weights", weights_name, "weights for weighted estimators")
        ->check(CLI::IsMember({"equal", "alpha", "count", "rfvar"}));
    estimate->add_option("--cov-model", cov_model, "covariance shape for rfvar")
        ->check(CLI::IsMember({"spherical", "truncated_exponential"}));
    estimate->add_option("--cov-params", cov_params, "variance,range for rfvar");
    estimate->add_flag("--timing", timing, "fill the runtime_ms column");
    add_common(estimate);

    auto* infer_cmd = app.add_subcommand("infer", "inference");
    infer_cmd->require_subcommand(1);
    auto* clt = infer_cmd->add_subcommand("clt", "CLT statistics, s estimate and interval coverage");
    clt->add_option("--config", config_path, "experiment config (JSON)")->required();
    clt->add_option("--out", out_path, "directory for clt_seeds.csv and clt_summary.csv");
    add_common(clt);

    auto* report = app.add_subcommand("report", "summarise a results CSV");
    report->add_option("--results", results_path, "results CSV")->required();
    report->add_option("--out", out_path, "output directory (default: next to the results)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (threads > 0) parallel::set_default_threads(threads);
        auto load = [&]() {
            if (config_path.empty() && patterns_dir.empty()) throw InputError("--config is required");
            config::ExperimentConfig cfg =
                config_path.empty() ? config_from_manifest(patterns_dir) : config::load_config(config_path);
            if (seed) cfg.seed = *seed;
            return cfg;
        };

        if (simulate->parsed()) {
            cmd_simulate(load(), out_path, replicate, threads);
            return 0;
        }
        if (estimate->parsed()) {
            const auto cfg = load();
            EstimateOptions opt;
            opt.threads = threads;
            opt.timing = timing;
            if (!weights_name.empty()) opt.weights = weights::parse_weight_kind(weights_name);
            if (!cov_model.empty() || !cov_params.empty()) {
                if (cov_model.empty() || cov_params.empty()) {
                    throw InputError("--cov-model and --cov-params must be given together");
                }
                const auto parts = split(cov_params);
                if (parts.size() != 2) throw InputError("--cov-params expects variance,range");
                sim::CovarianceModel cov;
                cov.shape = config::parse_covariance_shape(cov_model);
                cov.variance = parse_field(parts[0]);
                cov.range = parse_field(parts[1]);
                if (!(cov.variance > 0.0) || !(cov.range > 0.0)) {
                    throw InputError("--cov-params needs positive variance and range");
                }
                opt.cov = cov;
            }
            std::optional<fs::path> pdir;
            if (!patterns_dir.empty()) pdir = patterns_dir;
            const std::string target = !out_path.empty() ? out_path : cfg.output;
            if (target.empty()) return cmd_estimate(cfg, pdir, std::cout, opt);
            std::ostringstream buf;
            const int code = cmd_estimate(cfg, pdir, buf, opt);
            auto out = open_out(target);
            out << buf.str();
            if (!out) throw InputError("failed writing " + target);
            return code;
        }
        if (clt->parsed()) {
            std::optional<fs::path> dir;
            if (!out_path.empty()) dir = out_path;
            return cmd_infer_clt(load(), dir, std::cout, threads);
        }
        if (report->parsed()) {
            const fs::path res(results_path);
            cmd_report(res, out_path.empty() ? (res.has_parent_path() ? res.parent_path() : fs::path(".")) : fs::path(out_path));
            return 0;
        }
    } catch (const PatternParseError& e) {
        std::cerr << "mppstat: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        std::cerr << "mppstat: " << e.what() << '\n';
        return 2;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "mppstat: " << e.what() << '\n';
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "mppstat: " << e.what() << '\n';
        return 2;
    }
    return 2;
}

} // namespace mppstat::cli
