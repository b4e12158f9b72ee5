#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "oscillakdv/config.hpp"
#include "oscillakdv/csv.hpp"
#include "oscillakdv/snapshot_io.hpp"

namespace oscillakdv {

// Process exit codes.
struct ExitCode {
    static constexpr int ok = 0;
    static constexpr int config_error = 2;
    static constexpr int io_error = 3;
    static constexpr int growth_detected = 10;
    static constexpr int nan_detected = 11;
};

struct CliOptions {
    std::string subcommand;     // simulate | sweep | dichotomy | diagnose
    std::string config_path;
    std::string out_dir;        // optional override
    std::string resume_path;    // optional checkpoint
    int threads = 0;            // 0: hardware_concurrency
    long seed = 0;              // reserved for synthetic test data generators
    std::ostream* out = &std::cout;
    std::ostream* err = &std::cerr;
};

namespace detail {

inline std::string snapshot_filename(int ordinal) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "snap_%06d.okdv", ordinal);
    return buf;
}

inline void apply_out_dir(RunConfig& cfg, const std::string& out_dir) {
    if (out_dir.empty()) return;
    namespace fs = std::filesystem;
    cfg.outputs.snapshot_dir = (fs::path(out_dir) / "snapshots").string();
    cfg.outputs.csv_path = (fs::path(out_dir) / "scalars.csv").string();
    if (!cfg.outputs.checkpoint_path.empty() || cfg.outputs.checkpoint_every > 0)
        cfg.outputs.checkpoint_path = (fs::path(out_dir) / "checkpoint.okdv").string();
}

inline std::string checkpoint_path_of(const RunConfig& cfg) {
    if (!cfg.outputs.checkpoint_path.empty()) return cfg.outputs.checkpoint_path;
    return (std::filesystem::path(cfg.outputs.snapshot_dir) / "checkpoint.okdv").string();
}

// keep the header plus the first `rows` data rows
inline void truncate_csv(const std::string& path, uint32_t rows) {
    std::ifstream is(path);
    if (!is) return;
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(is, line)) lines.push_back(line);
    is.close();
    const size_t keep = std::min<size_t>(lines.size(), 1 + rows);
    std::ofstream os(path, std::ios::trunc);
    for (size_t i = 0; i < keep; ++i) os << lines[i] << '\n';
}

inline int status_exit_code(RunStatus s) {
    switch (s) {
        case RunStatus::completed: return ExitCode::ok;
        case RunStatus::blowup_detected: return ExitCode::growth_detected;
        case RunStatus::nan_detected: return ExitCode::nan_detected;
    }
    return ExitCode::io_error;
}

} // namespace detail

// Single simulation run with snapshot/CSV/checkpoint artifacts. `stop_after`
// (< 0: disabled) aborts after that many steps; used to exercise resume.
inline int run_simulate(const RunConfig& cfg_in, const CliOptions& opts, int stop_after = -1) {
    namespace fs = std::filesystem;
    RunConfig cfg = cfg_in;
    detail::apply_out_dir(cfg, opts.out_dir);

    const GridPtr grid = build_grid(cfg);
    const CoefficientSpec g = build_coefficient(cfg);
    const Field phi = build_initial_data(cfg, grid);
    const SolverConfig solver = build_solver(cfg, g, phi);
    const uint64_t digest = config_digest(cfg);
    const uint64_t g_digest = coefficient_digest(g);

    fs::create_directories(cfg.outputs.snapshot_dir);
    if (!fs::path(cfg.outputs.csv_path).parent_path().empty())
        fs::create_directories(fs::path(cfg.outputs.csv_path).parent_path());

    uint32_t snapshot_offset = 0;
    uint32_t scalar_offset = 0;
    Checkpoint resume_cp;
    const bool resuming = !opts.resume_path.empty();
    if (resuming) {
        resume_cp = load_checkpoint(opts.resume_path);
        if (resume_cp.config_digest != digest)
            throw ConfigError("resume: checkpoint was written by a different config");
        if (resume_cp.n != static_cast<uint32_t>(grid->size()) ||
            resume_cp.domain_length != grid->domain_length())
            throw ConfigError("resume: checkpoint grid does not match config");
        snapshot_offset = resume_cp.snapshot_count;
        scalar_offset = resume_cp.scalar_rows;
        detail::truncate_csv(cfg.outputs.csv_path, scalar_offset);
    }

    CsvWriter csv(cfg.outputs.csv_path, {"t", "mass", "energy", "h1_norm", "g_value"},
                  /*append=*/resuming);

    const std::string cp_path = detail::checkpoint_path_of(cfg);
    const int checkpoint_every = cfg.outputs.checkpoint_every;

    EvolveControl ctl;
    ctl.stop_after_steps = stop_after;
    if (resuming) {
        ctl.resume_state = &resume_cp.state;
        ctl.resume_step = resume_cp.step_index;
        ctl.resume_initial_h1 = resume_cp.initial_h1;
    }
    ctl.on_scalar = [&](const ScalarRecord& r) {
        csv.write_row({r.t, r.mass, r.energy, r.h1_norm, r.g_value});
    };
    ctl.on_snapshot = [&](int ordinal, const Snapshot& snap) {
        const auto name = detail::snapshot_filename(static_cast<int>(snapshot_offset) + ordinal);
        write_snapshot((fs::path(cfg.outputs.snapshot_dir) / name).string(), snap.field, snap.t,
                       solver.k, g_digest);
    };
    if (checkpoint_every > 0) {
        ctl.after_step = [&](int step_index, double t, const detail::cvec& state,
                             const Trajectory& so_far) {
            if (step_index % checkpoint_every != 0) return;
            Checkpoint cp;
            cp.config_digest = digest;
            cp.step_index = step_index;
            cp.time = t;
            cp.n = static_cast<uint32_t>(grid->size());
            cp.domain_length = grid->domain_length();
            cp.scalar_rows = scalar_offset + static_cast<uint32_t>(so_far.scalars.size());
            cp.snapshot_count = snapshot_offset + static_cast<uint32_t>(so_far.snapshots.size());
            cp.initial_h1 = so_far.initial_h1;
            cp.state = state;
            write_checkpoint(cp_path, cp);
        };
    }

    const Trajectory traj = evolve(phi, g, solver, ctl);
    for (const auto& w : traj.warnings) *opts.err << "warning: " << w << '\n';

    *opts.out << "status: " << to_string(traj.status);
    if (traj.status != RunStatus::completed) *opts.out << " at t = " << traj.event_time;
    *opts.out << "\nsnapshots: " << (snapshot_offset + traj.snapshots.size())
              << "\nscalar rows: " << (scalar_offset + traj.scalars.size())
              << "\nsnapshot_dir: " << cfg.outputs.snapshot_dir
              << "\ncsv: " << cfg.outputs.csv_path << '\n';
    return detail::status_exit_code(traj.status);
}

inline int run_sweep(const RunConfig& cfg_in, const CliOptions& opts) {
    namespace fs = std::filesystem;
    RunConfig cfg = cfg_in;
    detail::apply_out_dir(cfg, opts.out_dir);
    if (cfg.experiment.type != "sweep")
        throw ConfigError("sweep: config experiment.type must be \"sweep\"");

    const GridPtr grid = build_grid(cfg);
    const CoefficientSpec family = build_coefficient(cfg);
    if (family.variant() == CoefficientSpec::Variant::constant && family.mean() != 0.0)
        *opts.err << "note: constant coefficient; all sweep errors will be stepper noise\n";
    const Field phi = build_initial_data(cfg, grid);
    SolverConfig solver = build_solver(cfg, family, phi);
    // the sweep owns its time mesh over [0, T]; only explicit snapshot times
    // pass through, the simulate-style default count does not
    solver.snapshot_times = cfg.solver.snapshot_times;

    const int threads = opts.threads > 0
                            ? opts.threads
                            : static_cast<int>(std::thread::hardware_concurrency());

    // Default horizon: half the limiting run's detected-growth time, or the
    // local-existence heuristic when the limiting run never grows.
    double horizon = cfg.experiment.T;
    if (horizon <= 0.0) {
        const double h = existence_time_heuristic(family.sup_bound(),
                                                  sobolev_norm(phi, 1.0), solver.k);
        SolverConfig probe = solver;
        probe.t_end = h;
        probe.snapshot_times.clear();
        const Trajectory limiting_probe = solve_limiting(phi, family, probe);
        horizon = limiting_probe.status == RunStatus::blowup_detected
                      ? 0.5 * limiting_probe.event_time
                      : h;
        *opts.out << "auto horizon T = " << horizon << '\n';
    }

    const SweepResult result = averaging_sweep(phi, family, cfg.experiment.omegas,
                                               cfg.experiment.t0s, horizon, solver,
                                               std::max(1, threads));

    if (!fs::path(cfg.outputs.csv_path).parent_path().empty())
        fs::create_directories(fs::path(cfg.outputs.csv_path).parent_path());
    CsvWriter csv(cfg.outputs.csv_path,
                  {"omega", "t0", "err_h1_sup", "err_xt", "mass_drift", "status"});
    for (const auto& row : result.rows)
        csv.write_row({row.omega, row.t0, row.err_h1_sup, row.err_xt, row.mass_drift},
                      to_string(row.status));

    *opts.out << "rows: " << result.rows.size() << "\nconfig_digest: " << result.config_digest
              << '\n';
    if (result.fitted_rate)
        *opts.out << "fitted_rate: " << CsvWriter::format(*result.fitted_rate) << '\n';
    for (const auto& n : result.notes) *opts.err << "note: " << n << '\n';
    *opts.out << "csv: " << cfg.outputs.csv_path << '\n';
    return ExitCode::ok;
}

inline nlohmann::json branch_json(const DichotomyBranch& b) {
    return {{"ran", b.ran},
            {"omega", b.omega},
            {"t0", b.t0},
            {"t_end", b.t_end},
            {"status", to_string(b.status)},
            {"detect_time", b.detect_time},
            {"h1_initial", b.h1_initial},
            {"h1_max", b.h1_max},
            {"h1_final", b.h1_final}};
}

inline int run_dichotomy(const RunConfig& cfg_in, const CliOptions& opts) {
    namespace fs = std::filesystem;
    RunConfig cfg = cfg_in;
    detail::apply_out_dir(cfg, opts.out_dir);
    if (cfg.experiment.type != "dichotomy")
        throw ConfigError("dichotomy: config experiment.type must be \"dichotomy\"");

    const GridPtr grid = build_grid(cfg);
    const Field phi = build_initial_data(cfg, grid);
    const SolverConfig solver = build_solver(cfg, CoefficientSpec::constant(1.0), phi);

    DichotomyParams params;
    params.eps = cfg.experiment.eps;
    params.period = cfg.experiment.period;
    params.omega_small = cfg.experiment.omega_small;
    params.omega_large = cfg.experiment.omega_large;
    params.linear_window = cfg.experiment.linear_window;
    const DichotomyReport report = dichotomy_experiment(phi, params, solver);

    nlohmann::json j = {{"hypothesis_met", report.hypothesis_met},
                        {"t_star", report.t_star},
                        {"airy_h1", report.airy_h1},
                        {"large_h1_over_airy", report.airy_h1 > 0.0
                                                   ? report.large_omega.h1_max / report.airy_h1
                                                   : 0.0},
                        {"reference", branch_json(report.reference)},
                        {"small_omega", branch_json(report.small_omega)},
                        {"large_omega", branch_json(report.large_omega)},
                        {"phase_shift", branch_json(report.phase_shift)},
                        {"max_diff_vs_airy", report.max_diff_vs_airy},
                        {"strichartz_tail_at_T", report.strichartz_tail_at_T},
                        {"strichartz_horizon", report.strichartz_horizon},
                        {"strichartz_half_horizon_value", report.strichartz_half_horizon_value},
                        {"notes", report.notes}};
    const std::string report_path =
        (fs::path(opts.out_dir.empty() ? std::string(".") : opts.out_dir) / "dichotomy.json")
            .string();
    if (!opts.out_dir.empty()) fs::create_directories(opts.out_dir);
    std::ofstream os(report_path);
    if (!os) throw IoError("cannot write " + report_path);
    os << j.dump(2) << '\n';

    *opts.out << "hypothesis_met: " << (report.hypothesis_met ? "true" : "false") << '\n';
    if (report.hypothesis_met)
        *opts.out << "t_star: " << report.t_star
                  << "\nsmall_omega detect: " << report.small_omega.detect_time
                  << "\nlarge_omega status: " << to_string(report.large_omega.status) << '\n';
    *opts.out << "max_diff_vs_airy: " << report.max_diff_vs_airy
              << "\nstrichartz_tail_at_T: " << report.strichartz_tail_at_T
              << "\nreport: " << report_path << '\n';
    for (const auto& n : report.notes) *opts.err << "note: " << n << '\n';
    return ExitCode::ok;
}

inline int run_diagnose(const RunConfig& cfg_in, const CliOptions& opts) {
    namespace fs = std::filesystem;
    RunConfig cfg = cfg_in;
    detail::apply_out_dir(cfg, opts.out_dir);

    const GridPtr grid = build_grid(cfg);
    const CoefficientSpec g = build_coefficient(cfg);

    std::vector<std::string> files;
    if (!fs::is_directory(cfg.outputs.snapshot_dir))
        throw IoError("diagnose: snapshot directory " + cfg.outputs.snapshot_dir +
                      " does not exist");
    for (const auto& entry : fs::directory_iterator(cfg.outputs.snapshot_dir))
        if (entry.path().extension() == ".okdv" &&
            entry.path().filename().string().rfind("snap_", 0) == 0)
            files.push_back(entry.path().string());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw IoError("diagnose: no snapshots in " + cfg.outputs.snapshot_dir);

    Trajectory traj;
    bool k_mismatch = false;
    for (const auto& f : files) {
        auto [field, meta] = load_snapshot(f, grid);
        k_mismatch = k_mismatch || meta.k != cfg.solver.k;
        traj.snapshots.push_back({meta.time, std::move(field)});
    }
    if (k_mismatch)
        *opts.err << "warning: snapshot headers carry a different nonlinearity power k than "
                     "the config; the energy column uses the config value\n";
    std::sort(traj.snapshots.begin(), traj.snapshots.end(),
              [](const Snapshot& a, const Snapshot& b) { return a.t < b.t; });

    const std::string table_path =
        (fs::path(cfg.outputs.snapshot_dir) / "norm_table.csv").string();
    CsvWriter csv(table_path, {"t", "mass", "energy", "h1_norm"});
    for (const auto& snap : traj.snapshots)
        csv.write_row({snap.t, mass(snap.field), energy(snap.field, g.mean(), cfg.solver.k),
                       sobolev_norm(snap.field, 1.0)});

    *opts.out << "snapshots: " << traj.snapshots.size() << '\n';
    if (traj.snapshots.size() >= 2)
        *opts.out << "xt_norm: " << xt_norm(traj) << "\nyt_norm: " << yt_norm(traj) << '\n';
    *opts.out << "norm_table: " << table_path << '\n';
    return ExitCode::ok;
}

// CLI entry point shared by the binary and the tests.
inline int run_cli(const CliOptions& opts) {
    try {
        std::ifstream is(opts.config_path);
        if (!is) throw IoError("cannot open config " + opts.config_path);
        std::stringstream ss;
        ss << is.rdbuf();
        std::vector<std::string> warnings;
        const RunConfig cfg = parse_config(ss.str(), &warnings);
        for (const auto& w : warnings) *opts.err << "warning: " << w << '\n';

        if (opts.subcommand == "simulate") return run_simulate(cfg, opts);
        if (opts.subcommand == "sweep") return run_sweep(cfg, opts);
        if (opts.subcommand == "dichotomy") return run_dichotomy(cfg, opts);
        if (opts.subcommand == "diagnose") return run_diagnose(cfg, opts);
        throw ConfigError("unknown subcommand " + opts.subcommand);
    } catch (const ConfigError& e) {
        *opts.err << "config error: " << e.what() << '\n';
        return ExitCode::config_error;
    } catch (const ExperimentError& e) {
        *opts.err << "experiment error: " << e.what() << '\n';
        return ExitCode::config_error;
    } catch (const std::exception& e) {
        *opts.err << "error: " << e.what() << '\n';
        return ExitCode::io_error;
    }
}

} // namespace oscillakdv
