#include "mppstat/config.hpp"

#include "mppstat/error.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

namespace mppstat::config {

using nlohmann::json;

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw InputError("config " + path + ": " + what);
}

void require_object(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
}

void allow_keys(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
    require_object(j, path);
    const std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [k, _] : j.items()) {
        if (!ok.count(k)) fail(path, "unknown key '" + k + "'");
    }
}

const json& member(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key)) fail(path, std::string("missing required key '") + key + "'");
    return j.at(key);
}

double number(const json& j, const std::string& path, const char* key) {
    const json& v = member(j, path, key);
    if (!v.is_number()) fail(path + "." + key, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(path + "." + key, "must be finite");
    return x;
}

double number_or(const json& j, const std::string& path, const char* key, double fallback) {
    return j.contains(key) ? number(j, path, key) : fallback;
}

std::uint64_t count(const json& j, const std::string& path, const char* key, std::uint64_t fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
        fail(path + "." + key, "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
}

std::string text(const json& j, const std::string& path, const char* key) {
    const json& v = member(j, path, key);
    if (!v.is_string()) fail(path + "." + key, "expected a string");
    return v.get<std::string>();
}

std::string text_or(const json& j, const std::string& path, const char* key, const std::string& fallback) {
    return j.contains(key) ? text(j, path, key) : fallback;
}

sim::GroundSpec parse_ground(const json& j, const std::string& path) {
    const std::string kind = text(j, path, "kind");
    if (kind == "poisson") {
        allow_keys(j, path, {"kind", "intensity"});
        return sim::PoissonGround{number(j, path, "intensity")};
    }
    if (kind == "hardcore") {
        allow_keys(j, path, {"kind", "proposal_intensity", "min_dist"});
        return sim::HardcoreGround{number(j, path, "proposal_intensity"), number(j, path, "min_dist")};
    }
    if (kind == "grid") {
        allow_keys(j, path, {"kind", "spacing", "jitter"});
        return sim::GridGround{number(j, path, "spacing"), number_or(j, path, "jitter", 0.0)};
    }
    fail(path + ".kind", "expected poisson|hardcore|grid, got '" + kind + "'");
}

sim::MarkDistribution parse_distribution(const json& j, const std::string& path) {
    const std::string kind = text(j, path, "kind");
    if (kind == "normal") {
        allow_keys(j, path, {"kind", "mean", "sd"});
        return sim::NormalMarks{number(j, path, "mean"), number(j, path, "sd")};
    }
    if (kind == "uniform") {
        allow_keys(j, path, {"kind", "a", "b"});
        return sim::UniformMarks{number(j, path, "a"), number(j, path, "b")};
    }
    if (kind == "constant") {
        allow_keys(j, path, {"kind", "value"});
        return sim::ConstantMarks{number(j, path, "value")};
    }
    fail(path + ".kind", "expected normal|uniform|constant, got '" + kind + "'");
}

sim::CovarianceModel parse_covariance(const json& j, const std::string& path) {
    sim::CovarianceModel c;
    c.shape = parse_covariance_shape(text_or(j, path, "shape", "spherical"));
    c.variance = number(j, path, "variance");
    c.range = number(j, path, "range");
    return c;
}

sim::MarkSpec parse_marks(const json& j, const std::string& path) {
    const std::string kind = text(j, path, "kind");
    if (kind == "iid") {
        allow_keys(j, path, {"kind", "distribution"});
        return sim::IidMarks{parse_distribution(member(j, path, "distribution"), path + ".distribution")};
    }
    if (kind == "gaussian_field") {
        allow_keys(j, path, {"kind", "mean", "variance", "range", "shape"});
        return sim::GaussianFieldMarks{number(j, path, "mean"), parse_covariance(j, path)};
    }
    fail(path + ".kind", "expected iid|gaussian_field, got '" + kind + "'");
}

sim::ZRule parse_z(const json& j, const std::string& path) {
    const std::string kind = text(j, path, "kind");
    if (kind == "one") {
        allow_keys(j, path, {"kind"});
        return sim::UnitZ{};
    }
    if (kind == "constant") {
        allow_keys(j, path, {"kind", "value"});
        return sim::ConstantZ{number(j, path, "value")};
    }
    if (kind == "uniform") {
        allow_keys(j, path, {"kind", "a", "b"});
        return sim::UniformZ{number(j, path, "a"), number(j, path, "b")};
    }
    fail(path + ".kind", "expected one|constant|uniform, got '" + kind + "'");
}

json distribution_to_json(const sim::MarkDistribution& d) {
    return std::visit(overloaded{
                          [](const sim::NormalMarks& n) { return json{{"kind", "normal"}, {"mean", n.mean}, {"sd", n.sd}}; },
                          [](const sim::UniformMarks& u) { return json{{"kind", "uniform"}, {"a", u.a}, {"b", u.b}}; },
                          [](const sim::ConstantMarks& c) { return json{{"kind", "constant"}, {"value", c.c}}; },
                      },
                      d);
}

std::string hex64(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

} // namespace

sim::CovarianceShape parse_covariance_shape(const std::string& name) {
    if (name == "spherical") return sim::CovarianceShape::spherical;
    if (name == "truncated_exponential") return sim::CovarianceShape::truncated_exponential;
    throw InputError("unknown covariance shape '" + name + "' (expected spherical|truncated_exponential)");
}

EstimatorKind parse_estimator(const std::string& name) {
    if (name == "mu_hat_n") return EstimatorKind::mu_hat_n;
    if (name == "mu_hat_alpha") return EstimatorKind::mu_hat_alpha;
    if (name == "mu_hat_weighted") return EstimatorKind::mu_hat_weighted;
    if (name == "concat") return EstimatorKind::concat;
    throw InputError("unknown estimator '" + name + "' (expected mu_hat_n|mu_hat_alpha|mu_hat_weighted|concat)");
}

std::string to_string(EstimatorKind kind) {
    switch (kind) {
    case EstimatorKind::mu_hat_n: return "mu_hat_n";
    case EstimatorKind::mu_hat_alpha: return "mu_hat_alpha";
    case EstimatorKind::mu_hat_weighted: return "mu_hat_weighted";
    case EstimatorKind::concat: return "concat";
    }
    return "?";
}

sim::MixtureSpec parse_spec(const json& j) {
    const std::string path = "$.spec";
    allow_keys(j, path, {"dim", "classes"});
    sim::MixtureSpec spec;
    spec.dim = count(j, path, "dim", 1);
    const json& classes = member(j, path, "classes");
    if (!classes.is_array()) fail(path + ".classes", "expected an array");
    for (std::size_t k = 0; k < classes.size(); ++k) {
        const std::string cp = path + ".classes[" + std::to_string(k) + "]";
        const json& c = classes[k];
        allow_keys(c, cp, {"p", "ground", "marks", "z"});
        sim::MixtureClass cls{number(c, cp, "p"), parse_ground(member(c, cp, "ground"), cp + ".ground"),
                              parse_marks(member(c, cp, "marks"), cp + ".marks"), sim::UnitZ{}};
        if (c.contains("z")) cls.z = parse_z(c.at("z"), cp + ".z");
        spec.classes.push_back(std::move(cls));
    }
    try {
        spec.validate();
    } catch (const InputError& e) {
        fail(path, e.what());
    }
    return spec;
}

json spec_to_json(const sim::MixtureSpec& spec) {
    json classes = json::array();
    for (const auto& c : spec.classes) {
        json g = std::visit(overloaded{
                                [](const sim::PoissonGround& p) { return json{{"kind", "poisson"}, {"intensity", p.intensity}}; },
                                [](const sim::HardcoreGround& h) {
                                    return json{{"kind", "hardcore"},
                                                {"proposal_intensity", h.proposal_intensity},
                                                {"min_dist", h.min_dist}};
                                },
                                [](const sim::GridGround& g) {
                                    return json{{"kind", "grid"}, {"spacing", g.spacing}, {"jitter", g.jitter}};
                                },
                            },
                            c.ground);
        json m = std::visit(overloaded{
                                [](const sim::IidMarks& i) {
                                    return json{{"kind", "iid"}, {"distribution", distribution_to_json(i.dist)}};
                                },
                                [](const sim::GaussianFieldMarks& f) {
                                    return json{{"kind", "gaussian_field"},
                                                {"mean", f.mean},
                                                {"variance", f.cov.variance},
                                                {"range", f.cov.range},
                                                {"shape", f.cov.shape == sim::CovarianceShape::spherical
                                                              ? "spherical"
                                                              : "truncated_exponential"}};
                                },
                            },
                            c.marks);
        json z = std::visit(overloaded{
                                [](const sim::UnitZ&) { return json{{"kind", "one"}}; },
                                [](const sim::ConstantZ& v) { return json{{"kind", "constant"}, {"value", v.value}}; },
                                [](const sim::UniformZ& u) { return json{{"kind", "uniform"}, {"a", u.a}, {"b", u.b}}; },
                            },
                            c.z);
        classes.push_back({{"p", c.p}, {"ground", g}, {"marks", m}, {"z", z}});
    }
    return {{"dim", spec.dim}, {"classes", classes}};
}

ExperimentConfig parse_config(const json& j) {
    const std::string root = "$";
    allow_keys(j, root,
               {"spec", "T", "bands", "f", "estimators", "n_realizations", "n_replicates", "seed", "output",
                "rf_covariance", "oracle", "clt"});
    ExperimentConfig cfg;
    cfg.source = j;
    cfg.spec = parse_spec(member(j, root, "spec"));
    cfg.T = number(j, root, "T");
    if (!(cfg.T > 0.0)) fail("$.T", "must be > 0");

    const json& bands = member(j, root, "bands");
    if (!bands.is_array() || bands.empty()) fail("$.bands", "expected a non-empty array");
    for (std::size_t k = 0; k < bands.size(); ++k) {
        const std::string bp = "$.bands[" + std::to_string(k) + "]";
        allow_keys(bands[k], bp, {"lo", "hi"});
        try {
            cfg.bands.push_back(Band::for_dim(cfg.spec.dim, number(bands[k], bp, "lo"), number(bands[k], bp, "hi")));
        } catch (const InputError& e) {
            fail(bp, e.what());
        }
    }

    const json& f = member(j, root, "f");
    allow_keys(f, "$.f", {"name", "params", "base"});
    cfg.f.name = text(f, "$.f", "name");
    cfg.f.base = text_or(f, "$.f", "base", "");
    if (f.contains("params")) {
        require_object(f.at("params"), "$.f.params");
        for (const auto& [k, v] : f.at("params").items()) {
            if (!v.is_number()) fail("$.f.params." + k, "expected a number");
            cfg.f.params[k] = v.get<double>();
        }
    }
    try {
        (void)MarkFunctionRegistry::with_builtins().make(cfg.f);
    } catch (const InputError& e) {
        fail("$.f", e.what());
    }

    if (j.contains("estimators")) {
        const json& ests = j.at("estimators");
        if (!ests.is_array()) fail("$.estimators", "expected an array");
        for (std::size_t k = 0; k < ests.size(); ++k) {
            const std::string ep = "$.estimators[" + std::to_string(k) + "]";
            allow_keys(ests[k], ep, {"name", "weights"});
            EstimatorSpec e{};
            try {
                e.kind = parse_estimator(text(ests[k], ep, "name"));
                switch (e.kind) {
                case EstimatorKind::mu_hat_n: e.weights = weights::WeightKind::equal; break;
                case EstimatorKind::mu_hat_alpha: e.weights = weights::WeightKind::alpha_pairs; break;
                default: e.weights = weights::parse_weight_kind(text_or(ests[k], ep, "weights", "equal"));
                }
            } catch (const InputError& err) {
                fail(ep, err.what());
            }
            if (e.weights == weights::WeightKind::custom) fail(ep, "custom weights cannot be named in a config");
            cfg.estimators.push_back(e);
        }
    } else {
        cfg.estimators = {{EstimatorKind::mu_hat_alpha, weights::WeightKind::alpha_pairs},
                          {EstimatorKind::mu_hat_n, weights::WeightKind::equal}};
    }

    cfg.n_realizations = count(j, root, "n_realizations", 1);
    cfg.n_replicates = count(j, root, "n_replicates", 1);
    if (cfg.n_realizations < 1) fail("$.n_realizations", "must be >= 1");
    if (cfg.n_replicates < 1) fail("$.n_replicates", "must be >= 1");
    cfg.seed = count(j, root, "seed", 1);
    cfg.output = text_or(j, root, "output", "");

    if (j.contains("rf_covariance")) {
        const json& c = j.at("rf_covariance");
        allow_keys(c, "$.rf_covariance", {"shape", "variance", "range"});
        cfg.rf_covariance = RfCovariance{parse_covariance(c, "$.rf_covariance")};
    }
    if (j.contains("oracle")) {
        const json& o = j.at("oracle");
        allow_keys(o, "$.oracle", {"n_mc", "T"});
        cfg.oracle.n_mc = count(o, "$.oracle", "n_mc", 0);
        cfg.oracle.T = number_or(o, "$.oracle", "T", 100.0);
        if (cfg.oracle.n_mc != 0 && cfg.oracle.n_mc < 1000) fail("$.oracle.n_mc", "must be 0 or >= 1000");
    }
    if (j.contains("clt")) {
        const json& c = j.at("clt");
        allow_keys(c, "$.clt", {"u", "base_f", "centering", "level", "n_seeds"});
        CltSettings s;
        s.u = number_or(c, "$.clt", "u", 0.0);
        s.base_f = text_or(c, "$.clt", "base_f", "first");
        const std::string centering = text_or(c, "$.clt", "centering", "oracle");
        if (centering != "oracle" && centering != "plug_in") fail("$.clt.centering", "expected oracle|plug_in");
        s.oracle_centering = centering == "oracle";
        s.level = number_or(c, "$.clt", "level", 0.95);
        s.n_seeds = count(c, "$.clt", "n_seeds", 2000);
        if (!(s.u >= 0.0)) fail("$.clt.u", "must be >= 0");
        if (!(s.level > 0.0 && s.level < 1.0)) fail("$.clt.level", "must lie in (0, 1)");
        if (s.n_seeds < 30) fail("$.clt.n_seeds", "must be >= 30");
        cfg.clt = s;
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config file " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw InputError("config file " + path.string() + " is not valid JSON: " + e.what());
    }
    return parse_config(j);
}

std::string spec_hash(const json& spec) {
    std::uint64_t h = kFnvOffset;
    for (unsigned char c : spec.dump()) {
        h ^= c;
        h *= kFnvPrime;
    }
    return hex64(h);
}

std::string digest(const std::vector<double>& values) {
    std::uint64_t h = kFnvOffset;
    for (double v : values) {
        const auto bits = std::bit_cast<std::uint64_t>(v);
        for (int b = 0; b < 8; ++b) {
            h ^= (bits >> (8 * b)) & 0xffU;
            h *= kFnvPrime;
        }
    }
    return hex64(h);
}

} // namespace mppstat::config
