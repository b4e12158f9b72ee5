#pragma once

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "oscillakdv/experiments.hpp"
#include "oscillakdv/solver.hpp"

namespace oscillakdv {

// Run configuration, one-to-one with the JSON config document. Parsing
// collects every violation before reporting, each with its key path.

struct GridConfig {
    int n = 256;
    double domain_length = 64.0 * M_PI;
    bool operator==(const GridConfig&) const = default;
};

struct SolverSection {
    int k = 5;
    std::string scheme = "if_rk4";
    double dt = 1e-3;
    std::optional<double> t_end;       // absent: existence-time heuristic
    std::string dealias = "exact";     // "exact" | "two_thirds"
    std::optional<int> snapshot_count; // uniform mesh when times absent
    std::vector<double> snapshot_times;
    double blowup_h1_factor = 10.0;
    double blowup_amp_max = 1e6;
    int conserve_check_every = 10;
    bool operator==(const SolverSection&) const = default;
};

struct CoefficientSection {
    std::string variant = "constant";
    double c = 1.0;
    double omega = 0.0;
    double t0 = 0.0;
    double period = 2.0 * M_PI;
    double eps = 0.2;
    std::vector<double> samples;
    bool operator==(const CoefficientSection&) const = default;
};

struct InitialDataSection {
    std::string type = "gaussian"; // gaussian | solitary | from_file | zero
    double amplitude = 1.0;
    double width = 1.0;
    double center = 0.0;
    double c = 1.0;
    std::string path;
    bool operator==(const InitialDataSection&) const = default;
};

struct OutputSection {
    std::string snapshot_dir = "out";
    std::string csv_path = "out/scalars.csv";
    int checkpoint_every = 0; // steps; 0 disables checkpointing
    std::string checkpoint_path;
    bool operator==(const OutputSection&) const = default;
};

struct ExperimentSection {
    std::string type = "none"; // none | sweep | dichotomy
    // sweep
    std::vector<double> omegas;
    std::vector<double> t0s{0.0};
    double T = 0.0; // <= 0: auto (half the limiting growth time, else heuristic)
    // dichotomy
    double eps = 0.2;
    double period = 4.0;
    double omega_small = 0.0;
    double omega_large = 0.0;
    double linear_window = 0.0;
    bool operator==(const ExperimentSection&) const = default;
};

struct RunConfig {
    GridConfig grid;
    SolverSection solver;
    CoefficientSection coefficient;
    InitialDataSection initial_data;
    OutputSection outputs;
    ExperimentSection experiment;
    bool operator==(const RunConfig&) const = default;
};

namespace detail {

class ConfigReader {
public:
    explicit ConfigReader(const nlohmann::json& root) : root_(root) {}

    template <typename T>
    void get(const nlohmann::json& obj, const std::string& path, const char* key, T& out) {
        auto it = obj.find(key);
        if (it == obj.end()) return;
        try {
            out = it->get<T>();
        } catch (const nlohmann::json::exception&) {
            errors.push_back(path + "." + key + ": wrong type");
        }
    }

    const nlohmann::json* section(const char* key) {
        auto it = root_.find(key);
        if (it == root_.end()) return nullptr;
        if (!it->is_object()) {
            errors.push_back(std::string(key) + ": must be an object");
            return nullptr;
        }
        return &*it;
    }

    void check_keys(const nlohmann::json& obj, const std::string& path,
                    std::initializer_list<const char*> allowed) {
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            bool ok = false;
            for (const char* k : allowed)
                if (it.key() == k) ok = true;
            if (!ok) errors.push_back(path + "." + it.key() + ": unknown key");
        }
    }

    std::vector<std::string> errors;

private:
    const nlohmann::json& root_;
};

inline bool is_power_of_two_at_least(int n, int min) {
    return n >= min && (n & (n - 1)) == 0;
}

} // namespace detail

inline RunConfig parse_config(const std::string& text, std::vector<std::string>* warnings = nullptr) {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        // byte offset -> line number for a readable location
        size_t line = 1;
        for (size_t i = 0; i < e.byte && i < text.size(); ++i)
            if (text[i] == '\n') ++line;
        throw ConfigError("config parse error near line " + std::to_string(line) + ": " +
                          e.what());
    }
    if (!root.is_object()) throw ConfigError("config root must be an object");

    RunConfig cfg;
    detail::ConfigReader r(root);

    if (const auto* g = r.section("grid")) {
        r.check_keys(*g, "grid", {"n", "domain_length"});
        r.get(*g, "grid", "n", cfg.grid.n);
        r.get(*g, "grid", "domain_length", cfg.grid.domain_length);
    }
    if (const auto* s = r.section("solver")) {
        r.check_keys(*s, "solver",
                     {"k", "scheme", "dt", "t_end", "dealias", "snapshot_count",
                      "snapshot_times", "blowup_h1_factor", "blowup_amp_max",
                      "conserve_check_every"});
        r.get(*s, "solver", "k", cfg.solver.k);
        r.get(*s, "solver", "scheme", cfg.solver.scheme);
        r.get(*s, "solver", "dt", cfg.solver.dt);
        if (s->contains("t_end")) {
            double v = 0;
            r.get(*s, "solver", "t_end", v);
            cfg.solver.t_end = v;
        }
        r.get(*s, "solver", "dealias", cfg.solver.dealias);
        if (s->contains("snapshot_count")) {
            int v = 0;
            r.get(*s, "solver", "snapshot_count", v);
            cfg.solver.snapshot_count = v;
        }
        r.get(*s, "solver", "snapshot_times", cfg.solver.snapshot_times);
        r.get(*s, "solver", "blowup_h1_factor", cfg.solver.blowup_h1_factor);
        r.get(*s, "solver", "blowup_amp_max", cfg.solver.blowup_amp_max);
        r.get(*s, "solver", "conserve_check_every", cfg.solver.conserve_check_every);
    }
    if (const auto* c = r.section("coefficient")) {
        r.check_keys(*c, "coefficient", {"variant", "c", "omega", "t0", "period", "eps", "samples"});
        r.get(*c, "coefficient", "variant", cfg.coefficient.variant);
        r.get(*c, "coefficient", "c", cfg.coefficient.c);
        r.get(*c, "coefficient", "omega", cfg.coefficient.omega);
        r.get(*c, "coefficient", "t0", cfg.coefficient.t0);
        r.get(*c, "coefficient", "period", cfg.coefficient.period);
        r.get(*c, "coefficient", "eps", cfg.coefficient.eps);
        r.get(*c, "coefficient", "samples", cfg.coefficient.samples);
    }
    if (const auto* d = r.section("initial_data")) {
        r.check_keys(*d, "initial_data", {"type", "amplitude", "width", "center", "c", "path"});
        r.get(*d, "initial_data", "type", cfg.initial_data.type);
        r.get(*d, "initial_data", "amplitude", cfg.initial_data.amplitude);
        r.get(*d, "initial_data", "width", cfg.initial_data.width);
        r.get(*d, "initial_data", "center", cfg.initial_data.center);
        r.get(*d, "initial_data", "c", cfg.initial_data.c);
        r.get(*d, "initial_data", "path", cfg.initial_data.path);
    }
    if (const auto* o = r.section("outputs")) {
        r.check_keys(*o, "outputs",
                     {"snapshot_dir", "csv_path", "checkpoint_every", "checkpoint_path"});
        r.get(*o, "outputs", "snapshot_dir", cfg.outputs.snapshot_dir);
        r.get(*o, "outputs", "csv_path", cfg.outputs.csv_path);
        r.get(*o, "outputs", "checkpoint_every", cfg.outputs.checkpoint_every);
        r.get(*o, "outputs", "checkpoint_path", cfg.outputs.checkpoint_path);
    }
    if (const auto* e = r.section("experiment")) {
        r.check_keys(*e, "experiment",
                     {"type", "omegas", "t0s", "T", "eps", "period", "omega_small",
                      "omega_large", "linear_window"});
        r.get(*e, "experiment", "type", cfg.experiment.type);
        r.get(*e, "experiment", "omegas", cfg.experiment.omegas);
        r.get(*e, "experiment", "t0s", cfg.experiment.t0s);
        r.get(*e, "experiment", "T", cfg.experiment.T);
        r.get(*e, "experiment", "eps", cfg.experiment.eps);
        r.get(*e, "experiment", "period", cfg.experiment.period);
        r.get(*e, "experiment", "omega_small", cfg.experiment.omega_small);
        r.get(*e, "experiment", "omega_large", cfg.experiment.omega_large);
        r.get(*e, "experiment", "linear_window", cfg.experiment.linear_window);
    }
    for (auto it = root.begin(); it != root.end(); ++it) {
        bool ok = false;
        for (const char* k : {"grid", "solver", "coefficient", "initial_data", "outputs",
                              "experiment"})
            if (it.key() == k) ok = true;
        if (!ok) r.errors.push_back(it.key() + ": unknown section");
    }

    // -- validation, all violations reported at once -------------------------
    auto& errs = r.errors;
    if (!detail::is_power_of_two_at_least(cfg.grid.n, 16))
        errs.push_back("grid.n: must be a power of two >= 16");
    if (!(cfg.grid.domain_length > 0.0)) errs.push_back("grid.domain_length: must be positive");
    if (cfg.solver.k < 1) errs.push_back("solver.k: must be >= 1");
    if (cfg.solver.scheme != "if_rk4" && cfg.solver.scheme != "etdrk4")
        errs.push_back("solver.scheme: must be \"if_rk4\" or \"etdrk4\"");
    if (!(cfg.solver.dt > 0.0)) errs.push_back("solver.dt: must be positive");
    if (cfg.solver.t_end && !(*cfg.solver.t_end > 0.0))
        errs.push_back("solver.t_end: must be positive");
    if (cfg.solver.t_end && cfg.solver.dt > *cfg.solver.t_end)
        errs.push_back("solver.dt: must not exceed solver.t_end");
    if (cfg.solver.dealias != "exact" && cfg.solver.dealias != "two_thirds")
        errs.push_back("solver.dealias: must be \"exact\" or \"two_thirds\"");
    if (cfg.solver.snapshot_count && *cfg.solver.snapshot_count < 2)
        errs.push_back("solver.snapshot_count: must be >= 2");
    if (cfg.solver.t_end)
        for (double ts : cfg.solver.snapshot_times)
            if (ts < 0.0 || ts > *cfg.solver.t_end)
                errs.push_back("solver.snapshot_times: entry outside [0, t_end]");
    if (cfg.solver.conserve_check_every < 1)
        errs.push_back("solver.conserve_check_every: must be >= 1");
    if (!(cfg.solver.blowup_h1_factor > 0.0))
        errs.push_back("solver.blowup_h1_factor: must be positive");
    if (!(cfg.solver.blowup_amp_max > 0.0))
        errs.push_back("solver.blowup_amp_max: must be positive");

    const std::string& var = cfg.coefficient.variant;
    if (var != "constant" && var != "cosine" && var != "cos_squared" && var != "step_example" &&
        var != "tabulated")
        errs.push_back("coefficient.variant: unknown variant \"" + var + "\"");
    if (!(cfg.coefficient.period > 0.0)) errs.push_back("coefficient.period: must be positive");
    if (var == "step_example") {
        if (!(cfg.coefficient.period > 1.0))
            errs.push_back("coefficient.period: step_example needs period > 1");
        else if (!(cfg.coefficient.eps > 0.0 &&
                   cfg.coefficient.eps < 0.5 * (cfg.coefficient.period - 1.0) &&
                   cfg.coefficient.eps < 1.0))
            errs.push_back("coefficient.eps: need 0 < eps < min(1, (period-1)/2)");
    }
    if (var == "tabulated" && cfg.coefficient.samples.size() < 2)
        errs.push_back("coefficient.samples: need at least 2 samples");

    const std::string& dtype = cfg.initial_data.type;
    if (dtype != "gaussian" && dtype != "solitary" && dtype != "from_file" && dtype != "zero")
        errs.push_back("initial_data.type: unknown type \"" + dtype + "\"");
    if (dtype == "gaussian" && !(cfg.initial_data.width > 0.0))
        errs.push_back("initial_data.width: must be positive");
    if (dtype == "solitary" && !(cfg.initial_data.c > 0.0))
        errs.push_back("initial_data.c: must be positive");
    if (dtype == "from_file" && cfg.initial_data.path.empty())
        errs.push_back("initial_data.path: required for from_file");
    if (cfg.outputs.checkpoint_every < 0)
        errs.push_back("outputs.checkpoint_every: must be >= 0");

    const std::string& etype = cfg.experiment.type;
    if (etype != "none" && etype != "sweep" && etype != "dichotomy")
        errs.push_back("experiment.type: unknown type \"" + etype + "\"");
    if (etype == "sweep") {
        if (cfg.experiment.omegas.size() < 3)
            errs.push_back("experiment.omegas: need at least 3 values");
        if (cfg.experiment.t0s.empty()) errs.push_back("experiment.t0s: need at least one value");
    }
    if (etype == "dichotomy") {
        if (!(cfg.experiment.period > 1.0))
            errs.push_back("experiment.period: dichotomy needs period > 1");
        else if (!(cfg.experiment.eps > 0.0 &&
                   cfg.experiment.eps < 0.5 * (cfg.experiment.period - 1.0) &&
                   cfg.experiment.eps < 1.0))
            errs.push_back("experiment.eps: need 0 < eps < min(1, (period-1)/2)");
    }

    if (!errs.empty()) {
        std::ostringstream msg;
        msg << "invalid config (" << errs.size() << " problem" << (errs.size() > 1 ? "s" : "")
            << "):";
        for (const auto& e : errs) msg << "\n  - " << e;
        throw ConfigError(msg.str());
    }

    if (warnings && cfg.solver.dealias == "two_thirds" && cfg.solver.k >= 2)
        warnings->push_back("solver.dealias: the two_thirds mask is not alias-free for k >= 2; "
                            "selected for speed comparison only");
    return cfg;
}

inline std::string serialize_config(const RunConfig& cfg) {
    nlohmann::json root;
    root["grid"] = {{"n", cfg.grid.n}, {"domain_length", cfg.grid.domain_length}};
    nlohmann::json solver = {{"k", cfg.solver.k},
                             {"scheme", cfg.solver.scheme},
                             {"dt", cfg.solver.dt},
                             {"dealias", cfg.solver.dealias},
                             {"blowup_h1_factor", cfg.solver.blowup_h1_factor},
                             {"blowup_amp_max", cfg.solver.blowup_amp_max},
                             {"conserve_check_every", cfg.solver.conserve_check_every}};
    if (cfg.solver.t_end) solver["t_end"] = *cfg.solver.t_end;
    if (cfg.solver.snapshot_count) solver["snapshot_count"] = *cfg.solver.snapshot_count;
    if (!cfg.solver.snapshot_times.empty()) solver["snapshot_times"] = cfg.solver.snapshot_times;
    root["solver"] = solver;
    nlohmann::json coeff = {{"variant", cfg.coefficient.variant},
                            {"c", cfg.coefficient.c},
                            {"omega", cfg.coefficient.omega},
                            {"t0", cfg.coefficient.t0},
                            {"period", cfg.coefficient.period},
                            {"eps", cfg.coefficient.eps}};
    if (!cfg.coefficient.samples.empty()) coeff["samples"] = cfg.coefficient.samples;
    root["coefficient"] = coeff;
    root["initial_data"] = {{"type", cfg.initial_data.type},
                            {"amplitude", cfg.initial_data.amplitude},
                            {"width", cfg.initial_data.width},
                            {"center", cfg.initial_data.center},
                            {"c", cfg.initial_data.c},
                            {"path", cfg.initial_data.path}};
    root["outputs"] = {{"snapshot_dir", cfg.outputs.snapshot_dir},
                       {"csv_path", cfg.outputs.csv_path},
                       {"checkpoint_every", cfg.outputs.checkpoint_every},
                       {"checkpoint_path", cfg.outputs.checkpoint_path}};
    nlohmann::json exp = {{"type", cfg.experiment.type}};
    if (cfg.experiment.type == "sweep") {
        exp["omegas"] = cfg.experiment.omegas;
        exp["t0s"] = cfg.experiment.t0s;
        exp["T"] = cfg.experiment.T;
    } else if (cfg.experiment.type == "dichotomy") {
        exp["eps"] = cfg.experiment.eps;
        exp["period"] = cfg.experiment.period;
        exp["omega_small"] = cfg.experiment.omega_small;
        exp["omega_large"] = cfg.experiment.omega_large;
        exp["linear_window"] = cfg.experiment.linear_window;
    }
    root["experiment"] = exp;
    return root.dump(2);
}

// -- builders -----------------------------------------------------------------

inline GridPtr build_grid(const RunConfig& cfg) {
    return make_grid(cfg.grid.n, cfg.grid.domain_length);
}

inline CoefficientSpec build_coefficient(const RunConfig& cfg) {
    const auto& c = cfg.coefficient;
    if (c.variant == "constant") return CoefficientSpec::constant(c.c);
    if (c.variant == "cosine") return CoefficientSpec::cosine(c.omega, c.t0, c.period);
    if (c.variant == "cos_squared") return CoefficientSpec::cos_squared(c.omega, c.t0, c.period);
    if (c.variant == "step_example")
        return CoefficientSpec::step_example(c.eps, c.period, c.omega, c.t0);
    return CoefficientSpec::tabulated(c.samples, c.period, c.omega, c.t0);
}

Field load_snapshot_field(const std::string& path, const GridPtr& grid); // snapshot_io.hpp

inline Field build_initial_data(const RunConfig& cfg, const GridPtr& grid) {
    const auto& d = cfg.initial_data;
    if (d.type == "zero") return Field::zeros(grid);
    if (d.type == "gaussian") return gaussian_datum(grid, d.amplitude, d.width, d.center);
    if (d.type == "solitary") return solitary_wave(d.c, cfg.solver.k, grid, d.center);
    return load_snapshot_field(d.path, grid);
}

inline SolverConfig build_solver(const RunConfig& cfg, const CoefficientSpec& g,
                                 const Field& phi) {
    SolverConfig s;
    s.k = cfg.solver.k;
    s.scheme = cfg.solver.scheme == "etdrk4" ? Scheme::etdrk4 : Scheme::if_rk4;
    s.dt = cfg.solver.dt;
    s.dealias = cfg.solver.dealias == "two_thirds" ? DealiasPolicy::two_thirds()
                                                   : DealiasPolicy::exact(cfg.solver.k);
    s.blowup_h1_factor = cfg.solver.blowup_h1_factor;
    s.blowup_amp_max = cfg.solver.blowup_amp_max;
    s.conserve_check_every = cfg.solver.conserve_check_every;
    s.t_end = cfg.solver.t_end
                  ? *cfg.solver.t_end
                  : existence_time_heuristic(g.sup_bound(), sobolev_norm(phi, 1.0), s.k);
    if (!cfg.solver.snapshot_times.empty()) {
        s.snapshot_times = cfg.solver.snapshot_times;
    } else {
        const int count = cfg.solver.snapshot_count.value_or(11);
        for (int i = 0; i < count; ++i)
            s.snapshot_times.push_back(s.t_end * i / (count - 1));
    }
    return s;
}

inline uint64_t config_digest(const RunConfig& cfg) {
    Digest d;
    d.add(serialize_config(cfg));
    return d.value();
}

inline uint64_t coefficient_digest(const CoefficientSpec& g) {
    Digest d;
    d.add(g.variant_name());
    d.add(g.omega());
    d.add(g.t0());
    d.add(g.period());
    d.add(g.mean());
    d.add(g.sup_bound());
    return d.value();
}

} // namespace oscillakdv
