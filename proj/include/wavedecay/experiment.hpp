#pragma once

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wavedecay/decay.hpp"
#include "wavedecay/grid.hpp"
#include "wavedecay/kfunctional.hpp"
#include "wavedecay/linear_semigroups.hpp"
#include "wavedecay/nonlinear.hpp"
#include "wavedecay/profiles.hpp"
#include "wavedecay/toml.hpp"
#include "wavedecay/trajectory.hpp"

namespace wavedecay {

inline constexpr const char* kVersion = "wavedecay 0.1.0";

// ---------------------------------------------------------------------------
// Strict config reading: every key in the file must be consumed by the
// experiment's schema, with the right type; defaults are recorded so the
// resolved config (and its hash) is independent of which defaults were
// spelled out.
// ---------------------------------------------------------------------------
class ConfigReader {
  public:
    explicit ConfigReader(const TomlTable& table) : table_(table) {}

    double number(const std::string& key, double def) {
        if (const TomlValue* v = fetch(key, TomlValue::Type::number)) return v->num;
        record(key, format_double(def));
        return def;
    }
    double number_req(const std::string& key) {
        if (const TomlValue* v = fetch(key, TomlValue::Type::number)) return v->num;
        throw ConfigError("config: missing required key '" + key + "'");
    }
    std::string str(const std::string& key, const std::string& def) {
        if (const TomlValue* v = fetch(key, TomlValue::Type::string)) return v->str;
        record(key, "\"" + def + "\"");
        return def;
    }
    std::string str_req(const std::string& key) {
        if (const TomlValue* v = fetch(key, TomlValue::Type::string)) return v->str;
        throw ConfigError("config: missing required key '" + key + "'");
    }
    std::vector<double> numbers(const std::string& key, std::vector<double> def) {
        if (const TomlValue* v = fetch(key, TomlValue::Type::number_array))
            return v->nums;
        std::string repr = "[";
        for (size_t i = 0; i < def.size(); ++i)
            repr += (i ? "," : "") + format_double(def[i]);
        record(key, repr + "]");
        return def;
    }
    bool boolean(const std::string& key, bool def) {
        if (const TomlValue* v = fetch(key, TomlValue::Type::boolean)) return v->flag;
        record(key, def ? "true" : "false");
        return def;
    }

    // unknown keys are rejected with their full path
    void finish() const {
        for (const auto& [key, value] : table_)
            if (!consumed_.count(key))
                throw ConfigError("config: unknown key '" + key + "'");
    }

    // canonical resolved form (sorted), for hashing and the config echo
    const std::map<std::string, std::string>& resolved() const { return resolved_; }

  private:
    const TomlValue* fetch(const std::string& key, TomlValue::Type want) {
        auto it = table_.find(key);
        if (it == table_.end()) return nullptr;
        consumed_.insert(key);
        if (it->second.type != want)
            throw ConfigError("config: key '" + key + "' must be a " +
                              TomlValue{.type = want}.type_name() + ", got " +
                              it->second.type_name());
        record(key, canonical(it->second));
        return &it->second;
    }

    static std::string canonical(const TomlValue& v) {
        switch (v.type) {
            case TomlValue::Type::string: return "\"" + v.str + "\"";
            case TomlValue::Type::number: return format_double(v.num);
            case TomlValue::Type::boolean: return v.flag ? "true" : "false";
            case TomlValue::Type::number_array: {
                std::string repr = "[";
                for (size_t i = 0; i < v.nums.size(); ++i)
                    repr += (i ? "," : "") + format_double(v.nums[i]);
                return repr + "]";
            }
            case TomlValue::Type::string_array: {
                std::string repr = "[";
                for (size_t i = 0; i < v.strs.size(); ++i)
                    repr += (i ? std::string(",") : std::string()) + "\"" + v.strs[i] + "\"";
                return repr + "]";
            }
        }
        return "";
    }

    void record(const std::string& key, const std::string& value) {
        resolved_[key] = value;
    }

    const TomlTable& table_;
    std::set<std::string> consumed_;
    std::map<std::string, std::string> resolved_;
};

inline std::string config_hash16(const std::map<std::string, std::string>& resolved) {
    uint64_t h = 1469598103934665603ull;  // FNV-1a
    auto mix = [&h](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ull;
        }
    };
    for (const auto& [key, value] : resolved) {
        if (key == "output.dir") continue;  // location is not semantics
        mix(key);
        mix("=");
        mix(value);
        mix("\n");
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// ---------------------------------------------------------------------------
// Experiment registry (drives `list` and the validation dispatch).
// ---------------------------------------------------------------------------
struct ExperimentKindInfo {
    std::string name;
    std::string validates;
    std::string required_keys;
};

inline const std::vector<ExperimentKindInfo>& experiment_registry() {
    static const std::vector<ExperimentKindInfo> kinds = {
        {"profile", "traveling-wave profile construction and steady-state residual",
         "flux.name, grid.xmin, grid.xmax, grid.n; kdvb: profile.alpha"},
        {"evolve-burgers", "viscous perturbation evolution (mass conservation)",
         "grid.*, time.T, time.dt"},
        {"evolve-kdvb", "dispersive-viscous perturbation evolution (mass conservation)",
         "grid.*, time.T, time.dt, profile.alpha"},
        {"linear-semigroup",
         "linearized semigroup bounds: weighted exponential decay, contraction, "
         "decay certificate",
         "linear.family, grid.*, time.T, time.dt"},
        {"kfunc", "equality of the closed-form and infimum K-functionals",
         "none (defaults cover the standard sweep)"},
        {"interp-verify", "weighted-space interpolation rate (1+t)^{k-l}",
         "interp.semigroup"},
        {"lemma-c1", "convolution bound sup_t t^alpha I(t) < infinity",
         "lemma.alpha, lemma.beta"},
        {"thm31", "algebraic decay rate m - k for the viscous wave",
         "none (defaults reproduce the standard run)"},
        {"thm42", "algebraic decay rate m - k for the dispersive-viscous wave",
         "none (defaults reproduce the standard run)"},
    };
    return kinds;
}

inline std::string list_experiments_text() {
    std::string out = "experiment kinds:\n";
    for (const auto& k : experiment_registry()) {
        out += "  " + k.name + "\n      validates: " + k.validates +
               "\n      required: " + k.required_keys + "\n";
    }
    return out;
}

inline std::string nearest_kind(const std::string& name) {
    // smallest edit distance, ties to the first entry
    auto distance = [](const std::string& a, const std::string& b) {
        std::vector<std::vector<size_t>> d(a.size() + 1,
                                           std::vector<size_t>(b.size() + 1, 0));
        for (size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
        for (size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
        for (size_t i = 1; i <= a.size(); ++i)
            for (size_t j = 1; j <= b.size(); ++j)
                d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1,
                                    d[i - 1][j - 1] + (a[i - 1] != b[j - 1])});
        return d[a.size()][b.size()];
    };
    std::string best;
    size_t best_d = SIZE_MAX;
    for (const auto& k : experiment_registry()) {
        const size_t dist = distance(name, k.name);
        if (dist < best_d) {
            best_d = dist;
            best = k.name;
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Shared config fragments.
// ---------------------------------------------------------------------------
namespace exp_detail {

inline Grid1D read_grid(ConfigReader& r, double xmin, double xmax, double n) {
    const double gxmin = r.number("grid.xmin", xmin);
    const double gxmax = r.number("grid.xmax", xmax);
    const double gn = r.number("grid.n", n);
    if (gn != std::floor(gn) || gn < 3)
        throw ConfigError("config: grid.n must be an integer >= 3");
    return Grid1D::uniform(gxmin, gxmax, static_cast<int>(gn));
}

inline FluxSpec read_flux(ConfigReader& r, const std::string& def_name) {
    const std::string name = r.str("flux.name", def_name);
    if (name == "burgers_quadratic") return FluxSpec::burgers_quadratic();
    if (name == "kdvb_cubic") return FluxSpec::kdvb_cubic(r.number("flux.b", 2.0));
    if (name == "polynomial") {
        const auto coeffs = r.numbers("flux.coeffs", {});
        if (coeffs.empty())
            throw ConfigError("config: flux.coeffs required for polynomial flux");
        return FluxSpec::polynomial(coeffs);
    }
    throw ConfigError("config: unknown flux.name '" + name +
                      "' (burgers_quadratic | kdvb_cubic | polynomial)");
}

inline PerturbationSpec read_perturbation(ConfigReader& r) {
    const std::string family = r.str("perturbation.family", "poly_decay");
    const double k = r.number("perturbation.k", 3.0);
    const double delta = r.number("perturbation.delta", 1e-2);
    if (family == "poly_decay") return PerturbationSpec::poly_decay(k, delta);
    if (family == "gaussian") return PerturbationSpec::gaussian(delta);
    if (family == "derivative_of_poly_decay")
        return PerturbationSpec::derivative_of_poly_decay(k, delta);
    if (family == "derivative_of_gaussian")
        return PerturbationSpec::derivative_of_gaussian(delta);
    throw ConfigError("config: unknown perturbation.family '" + family + "'");
}

inline Lp read_lp(const std::string& s, const std::string& key) {
    if (s == "1") return Lp::one;
    if (s == "2") return Lp::two;
    if (s == "4") return Lp::four;
    if (s == "inf") return Lp::inf;
    throw ConfigError("config: " + key + " must be one of \"1\", \"2\", \"4\", \"inf\"");
}

inline std::vector<double> geometric_times(double lo, double hi, int count) {
    std::vector<double> ts;
    const double r = (count > 1) ? std::pow(hi / lo, 1.0 / (count - 1)) : 1.0;
    for (int i = 0; i < count; ++i) ts.push_back(lo * std::pow(r, i));
    return ts;
}

inline GridFunction derivative_endpoints(const GridFunction& c) {
    GridFunction cp = stencil_d1(c);
    const Grid1D& g = c.grid;
    cp[0] = (c[1] - c[0]) / g.dx;
    cp[1] = (c[2] - c[0]) / (2.0 * g.dx);
    cp[g.n - 2] = (c[g.n - 1] - c[g.n - 3]) / (2.0 * g.dx);
    cp[g.n - 1] = (c[g.n - 1] - c[g.n - 2]) / g.dx;
    return cp;
}

}  // namespace exp_detail

// ---------------------------------------------------------------------------
// Validation + dispatch.
// ---------------------------------------------------------------------------
struct ExperimentResult {
    std::string kind;
    std::string hash16;
    std::filesystem::path dir;
    nlohmann::json report;
    bool passed = true;
};

// Runs one experiment kind with an already-open reader; fills results and
// writes kind-specific artifacts into dir (created by the caller).
nlohmann::json run_experiment_kind(const std::string& kind, ConfigReader& r,
                                   std::mt19937_64& rng,
                                   const std::filesystem::path& dir, bool& passed);

inline ExperimentResult run_config(const TomlTable& table,
                                   const std::filesystem::path& out_root_hint = {}) {
    ConfigReader reader(table);
    const std::string kind = reader.str_req("experiment");
    bool known = false;
    for (const auto& k : experiment_registry()) known |= (k.name == kind);
    if (!known)
        throw ConfigError("config: unknown experiment '" + kind +
                          "'; nearest valid kind is '" + nearest_kind(kind) + "'");

    const double seed = reader.number("seed", 0.0);
    std::string out_root = reader.str("output.dir", "");
    if (out_root.empty()) {
        if (!out_root_hint.empty()) out_root = out_root_hint.string();
        else if (const char* env = std::getenv("WAVEDECAY_OUT")) out_root = env;
        else out_root = "out";
    }

    std::mt19937_64 rng(static_cast<uint64_t>(seed));
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentResult res;
    res.kind = kind;
    bool passed = true;

    // dry pass: full schema + parameter validation (and the config hash)
    // before any compute starts
    {
        ConfigReader dry(table);
        dry.str_req("experiment");
        dry.number("seed", 0.0);
        dry.str("output.dir", "");
        std::mt19937_64 dry_rng(0);
        run_experiment_kind(kind, dry, dry_rng, "", passed);  // empty dir = no run
        dry.finish();
        res.hash16 = config_hash16(dry.resolved());
    }

    res.dir = std::filesystem::path(out_root) / (kind + "-" + res.hash16);
    std::filesystem::remove_all(res.dir);
    std::filesystem::create_directories(res.dir);

    passed = true;
    nlohmann::json results =
        run_experiment_kind(kind, reader, rng, res.dir, passed);
    reader.finish();

    const auto t1 = std::chrono::steady_clock::now();
    nlohmann::json report;
    report["experiment"] = kind;
    report["config_hash"] = res.hash16;
    nlohmann::json echo;
    for (const auto& [key, value] : reader.resolved()) echo[key] = value;
    report["config"] = echo;
    report["results"] = results;
    report["passed"] = passed;
    report["version"] = kVersion;
    report["wall_clock_seconds"] =
        std::chrono::duration<double>(t1 - t0).count();
    {
        const std::time_t now = std::time(nullptr);
        char stamp[64];
        std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        report["completed_at"] = stamp;
    }

    {
        std::ofstream out(res.dir / "report.json");
        out << report.dump(2) << "\n";
        std::ofstream meta(res.dir / "meta.json");
        nlohmann::json m;
        m["experiment"] = kind;
        m["config"] = echo;
        m["config_hash"] = res.hash16;
        m["version"] = kVersion;
        meta << m.dump(2) << "\n";
    }
    res.report = report;
    res.passed = passed;
    return res;
}

inline ExperimentResult run_config_file(const std::filesystem::path& config_path,
                                        const std::filesystem::path& out_root = {}) {
    return run_config(parse_toml_file(config_path), out_root);
}

inline void validate_config_file(const std::filesystem::path& config_path) {
    const TomlTable table = parse_toml_file(config_path);
    ConfigReader reader(table);
    const std::string kind = reader.str_req("experiment");
    bool known = false;
    for (const auto& k : experiment_registry()) known |= (k.name == kind);
    if (!known)
        throw ConfigError("config: unknown experiment '" + kind +
                          "'; nearest valid kind is '" + nearest_kind(kind) + "'");
    reader.number("seed", 0.0);
    reader.str("output.dir", "");
    bool passed = true;
    std::mt19937_64 rng(0);
    run_experiment_kind(kind, reader, rng, "", passed);
    reader.finish();
}

}  // namespace wavedecay

#include "wavedecay/experiment_kinds.hpp"
