#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "oscillakdv/oscillakdv.hpp"
#include "test_util.hpp"

using namespace oscillakdv;
namespace fs = std::filesystem;

namespace {

std::string minimal_config() {
    return R"({
  "grid": {"n": 64, "domain_length": 201.06192982974676},
  "solver": {"k": 5, "dt": 0.001, "t_end": 0.01},
  "coefficient": {"variant": "constant", "c": 1.0},
  "initial_data": {"type": "gaussian", "amplitude": 0.3, "width": 6.0}
})";
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("okdv_test_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream os(p, std::ios::binary);
    os << text;
}

} // namespace

TEST_CASE("minimal config parses with documented defaults") {
    const RunConfig cfg = parse_config(minimal_config());
    CHECK(cfg.grid.n == 64);
    CHECK(cfg.solver.scheme == "if_rk4");
    CHECK(cfg.solver.dealias == "exact");
    CHECK(cfg.solver.blowup_h1_factor == 10.0);
    CHECK(cfg.solver.blowup_amp_max == 1e6);
    CHECK(cfg.coefficient.variant == "constant");
    CHECK(cfg.experiment.type == "none");
}

TEST_CASE("validation errors carry key paths and are collected together") {
    std::string doc = R"({
  "grid": {"n": 100, "domain_length": -5},
  "solver": {"k": 0, "dt": 0.001, "t_end": 0.01}
})";
    try {
        parse_config(doc);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("grid.n") != std::string::npos);
        CHECK(msg.find("grid.domain_length") != std::string::npos);
        CHECK(msg.find("solver.k") != std::string::npos);
    }
}

TEST_CASE("unknown keys are rejected with their path") {
    std::string doc = R"({"grid": {"n": 64, "domain_length": 10, "nx": 3}})";
    try {
        parse_config(doc);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("grid.nx") != std::string::npos);
    }
}

TEST_CASE("parse errors report a line") {
    try {
        parse_config("{\n  \"grid\": {\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("line") != std::string::npos);
    }
}

TEST_CASE("config round-trips through serialize and parse") {
    RunConfig cfg = parse_config(minimal_config());
    cfg.solver.snapshot_times = {0.0, 0.003, 0.01};
    cfg.coefficient.variant = "step_example";
    cfg.coefficient.eps = 0.25;
    cfg.coefficient.period = 4.0;
    cfg.coefficient.omega = 3.5;
    cfg.experiment.type = "sweep";
    cfg.experiment.omegas = {10, 20, 40};
    const RunConfig back = parse_config(serialize_config(cfg));
    CHECK(back == cfg);
    // and serialization is a fixed point
    CHECK(serialize_config(back) == serialize_config(cfg));
}

TEST_CASE("two_thirds dealiasing with k >= 2 warns") {
    std::string doc = R"({
  "grid": {"n": 64, "domain_length": 10},
  "solver": {"k": 5, "dt": 0.001, "t_end": 0.01, "dealias": "two_thirds"}
})";
    std::vector<std::string> warnings;
    parse_config(doc, &warnings);
    REQUIRE(!warnings.empty());
    CHECK(warnings.front().find("two_thirds") != std::string::npos);
}

TEST_CASE("snapshot files reload bitwise") {
    TempDir dir;
    const auto g = make_grid(128, 40.0);
    const Field f = testutil::random_real_field(g, 77);
    const std::string path = (dir.path / "snap.okdv").string();
    write_snapshot(path, f, 1.25, 5, 0xabcdef12u);
    const auto [loaded, meta] = load_snapshot(path, g);
    CHECK(loaded.samples() == f.samples()); // bitwise
    CHECK(meta.time == 1.25);
    CHECK(meta.k == 5);
    CHECK(meta.coefficient_digest == 0xabcdef12u);

    const auto wrong_grid = make_grid(64, 40.0);
    CHECK_THROWS_AS(load_snapshot(path, wrong_grid), ConfigError);
    CHECK_THROWS_AS(load_snapshot((dir.path / "missing.okdv").string()), IoError);

    spit(dir.path / "junk.okdv", "not a snapshot at all");
    CHECK_THROWS_AS(load_snapshot((dir.path / "junk.okdv").string()), IoError);
}

TEST_CASE("checkpoints reload bitwise") {
    TempDir dir;
    Checkpoint cp;
    cp.config_digest = 42;
    cp.step_index = 17;
    cp.time = 0.017;
    cp.n = 8;
    cp.domain_length = 10.0;
    cp.scalar_rows = 3;
    cp.snapshot_count = 2;
    cp.initial_h1 = 1.7320508;
    cp.state = {{1.0, -2.0}, {0.5, 0.25}, {0, 0}, {1e-30, 3.0}, {0, 0}, {0, 0}, {7, 8}, {9, -1}};
    const std::string path = (dir.path / "cp.okdv").string();
    write_checkpoint(path, cp);
    const Checkpoint back = load_checkpoint(path);
    CHECK(back.config_digest == cp.config_digest);
    CHECK(back.step_index == cp.step_index);
    CHECK(back.time == cp.time);
    CHECK(back.scalar_rows == cp.scalar_rows);
    CHECK(back.snapshot_count == cp.snapshot_count);
    CHECK(back.initial_h1 == cp.initial_h1);
    CHECK(back.state == cp.state);
}

TEST_CASE("simulate produces snapshots, scalars, and exit code 0") {
    TempDir dir;
    const RunConfig cfg = parse_config(minimal_config());
    CliOptions opts;
    opts.subcommand = "simulate";
    opts.out_dir = dir.path.string();
    std::ostringstream out, err;
    opts.out = &out;
    opts.err = &err;
    CHECK(run_simulate(cfg, opts) == ExitCode::ok);
    CHECK(fs::exists(dir.path / "snapshots" / "snap_000000.okdv"));
    CHECK(fs::exists(dir.path / "scalars.csv"));
    const std::string csv = slurp(dir.path / "scalars.csv");
    CHECK(csv.rfind("t,mass,energy,h1_norm,g_value\n", 0) == 0);
}

TEST_CASE("simulate with the zero datum completes with exit 0") {
    TempDir dir;
    RunConfig cfg = parse_config(minimal_config());
    cfg.initial_data.type = "zero";
    CliOptions opts;
    opts.subcommand = "simulate";
    opts.out_dir = dir.path.string();
    std::ostringstream out;
    opts.out = &out;
    CHECK(run_simulate(cfg, opts) == ExitCode::ok);
}

TEST_CASE("growth detection maps to its own exit code") {
    TempDir dir;
    RunConfig cfg = parse_config(minimal_config());
    cfg.grid.n = 2048;
    cfg.grid.domain_length = 32.0 * M_PI;
    cfg.initial_data.amplitude = 2.5;
    cfg.initial_data.width = 1.0;
    cfg.solver.dt = 5e-5;
    cfg.solver.t_end = 0.2;
    cfg.solver.blowup_h1_factor = 3.5;
    cfg.solver.conserve_check_every = 10;
    CliOptions opts;
    opts.subcommand = "simulate";
    opts.out_dir = dir.path.string();
    std::ostringstream out;
    opts.out = &out;
    CHECK(run_simulate(cfg, opts) == ExitCode::growth_detected);
}

TEST_CASE("checkpoint-resume reproduces the uninterrupted artifacts bitwise") {
    TempDir full_dir, resumed_dir;
    RunConfig cfg = parse_config(minimal_config());
    cfg.solver.t_end = 0.02;
    cfg.solver.snapshot_count = 5;
    cfg.outputs.checkpoint_every = 7;

    std::ostringstream sink;
    CliOptions opts;
    opts.subcommand = "simulate";
    opts.out = &sink;
    opts.err = &sink;

    // uninterrupted reference
    opts.out_dir = full_dir.path.string();
    REQUIRE(run_simulate(cfg, opts) == ExitCode::ok);

    // interrupted run, then resume from its checkpoint
    opts.out_dir = resumed_dir.path.string();
    REQUIRE(run_simulate(cfg, opts, /*stop_after=*/9) == ExitCode::ok);
    REQUIRE(fs::exists(resumed_dir.path / "checkpoint.okdv"));
    opts.resume_path = (resumed_dir.path / "checkpoint.okdv").string();
    REQUIRE(run_simulate(cfg, opts) == ExitCode::ok);

    // compare every snapshot and the scalars bitwise
    for (const auto& entry : fs::directory_iterator(full_dir.path / "snapshots")) {
        const auto name = entry.path().filename();
        CHECK(fs::exists(resumed_dir.path / "snapshots" / name));
        CHECK(slurp(entry.path()) == slurp(resumed_dir.path / "snapshots" / name));
    }
    CHECK(slurp(full_dir.path / "scalars.csv") == slurp(resumed_dir.path / "scalars.csv"));
}

TEST_CASE("resume refuses a checkpoint from a different config") {
    TempDir dir;
    RunConfig cfg = parse_config(minimal_config());
    cfg.solver.t_end = 0.02;
    cfg.outputs.checkpoint_every = 5;
    std::ostringstream sink;
    CliOptions opts;
    opts.subcommand = "simulate";
    opts.out = &sink;
    opts.err = &sink;
    opts.out_dir = dir.path.string();
    REQUIRE(run_simulate(cfg, opts, /*stop_after=*/10) == ExitCode::ok);

    RunConfig other = cfg;
    other.initial_data.amplitude = 0.4;
    opts.resume_path = (dir.path / "checkpoint.okdv").string();
    CHECK_THROWS_AS(run_simulate(other, opts), ConfigError);
}

TEST_CASE("sweep with a constant coefficient writes near-zero error columns") {
    TempDir dir;
    RunConfig cfg = parse_config(minimal_config());
    cfg.grid.n = 128;
    cfg.experiment.type = "sweep";
    cfg.experiment.omegas = {10, 20, 40};
    cfg.experiment.t0s = {0.0};
    cfg.experiment.T = 0.01;
    CliOptions opts;
    opts.subcommand = "sweep";
    opts.threads = 2;
    opts.out_dir = dir.path.string();
    std::ostringstream out, err;
    opts.out = &out;
    opts.err = &err;
    REQUIRE(run_sweep(cfg, opts) == ExitCode::ok);

    std::ifstream is(dir.path / "scalars.csv");
    std::string header;
    std::getline(is, header);
    CHECK(header == "omega,t0,err_h1_sup,err_xt,mass_drift,status");
    std::string line;
    int rows = 0;
    while (std::getline(is, line)) {
        ++rows;
        double omega, t0, err_h1, err_xt;
        char c;
        std::istringstream ls(line);
        ls >> omega >> c >> t0 >> c >> err_h1 >> c >> err_xt;
        CHECK(err_h1 < 1e-10);
        CHECK(err_xt < 1e-10);
        CHECK(line.find("completed") != std::string::npos);
    }
    CHECK(rows == 3);
}

TEST_CASE("diagnose rebuilds a norm table from stored snapshots") {
    TempDir dir;
    RunConfig cfg = parse_config(minimal_config());
    cfg.solver.snapshot_count = 4;
    CliOptions opts;
    opts.subcommand = "simulate";
    opts.out_dir = dir.path.string();
    std::ostringstream out;
    opts.out = &out;
    REQUIRE(run_simulate(cfg, opts) == ExitCode::ok);

    std::ostringstream out2;
    CliOptions dopts;
    dopts.subcommand = "diagnose";
    dopts.out_dir = dir.path.string();
    dopts.out = &out2;
    REQUIRE(run_diagnose(cfg, dopts) == ExitCode::ok);
    CHECK(fs::exists(dir.path / "snapshots" / "norm_table.csv"));
    const std::string table = slurp(dir.path / "snapshots" / "norm_table.csv");
    CHECK(table.rfind("t,mass,energy,h1_norm\n", 0) == 0);
    CHECK(out2.str().find("xt_norm") != std::string::npos);
}

TEST_CASE("run_cli reports config problems with exit code 2") {
    TempDir dir;
    const fs::path cfg_path = dir.path / "bad.json";
    spit(cfg_path, R"({"grid": {"n": 100, "domain_length": 10}})");
    CliOptions opts;
    opts.subcommand = "simulate";
    opts.config_path = cfg_path.string();
    std::ostringstream out, err;
    opts.out = &out;
    opts.err = &err;
    CHECK(run_cli(opts) == ExitCode::config_error);
    CHECK(err.str().find("grid.n") != std::string::npos);

    opts.config_path = (dir.path / "missing.json").string();
    CHECK(run_cli(opts) == ExitCode::io_error);
}

TEST_CASE("the installed binary wires subcommands, env threads, and exit codes") {
    const char* bin = OSCILLAKDV_CLI_PATH;
    if (!fs::exists(bin)) {
        SKIP("CLI binary not built");
    }
    TempDir dir;
    const fs::path cfg_path = dir.path / "run.json";
    spit(cfg_path, minimal_config());
    const std::string base = std::string(bin) + " simulate --config " + cfg_path.string() +
                             " --out " + (dir.path / "out").string();
    CHECK(WEXITSTATUS(std::system((base + " > /dev/null 2>&1").c_str())) == 0);
    CHECK(fs::exists(dir.path / "out" / "snapshots" / "snap_000000.okdv"));

    // env fallback for --threads must be accepted
    const std::string with_env = "OSCILLAKDV_THREADS=2 " + base + " > /dev/null 2>&1";
    CHECK(WEXITSTATUS(std::system(with_env.c_str())) == 0);

    // config problems surface as exit 2 through the real binary
    spit(dir.path / "bad.json", R"({"grid": {"n": 100}})");
    const std::string bad = std::string(bin) + " simulate --config " +
                            (dir.path / "bad.json").string() + " > /dev/null 2>&1";
    CHECK(WEXITSTATUS(std::system(bad.c_str())) == 2);

    const std::string usage = std::string(bin) + " > /dev/null 2>&1";
    CHECK(WEXITSTATUS(std::system(usage.c_str())) != 0);
}

TEST_CASE("omitted t_end falls back to the existence-time heuristic") {
    RunConfig cfg = parse_config(minimal_config());
    REQUIRE(cfg.solver.t_end.has_value());
    cfg.solver.t_end.reset();
    const GridPtr grid = build_grid(cfg);
    const CoefficientSpec g = build_coefficient(cfg);
    const Field phi = build_initial_data(cfg, grid);
    const SolverConfig solver = build_solver(cfg, g, phi);
    const double h1 = sobolev_norm(phi, 1.0);
    // T = 1 / (sup|g|^2 |phi|_{H1}^{2k})
    CHECK(solver.t_end == Catch::Approx(1.0 / std::pow(h1, 10.0)).epsilon(1e-12));
    CHECK(existence_time_heuristic(2.0, 1.5, 5) ==
          Catch::Approx(1.0 / (4.0 * std::pow(1.5, 10.0))).epsilon(1e-12));
}

TEST_CASE("sweep horizon defaults to the existence heuristic when omitted") {
    TempDir dir;
    RunConfig cfg = parse_config(minimal_config());
    cfg.grid.n = 128;
    cfg.initial_data.amplitude = 0.6;
    cfg.initial_data.width = 4.0;
    cfg.coefficient.variant = "cosine";
    cfg.coefficient.omega = 1.0;
    cfg.experiment.type = "sweep";
    cfg.experiment.omegas = {10, 20, 40};
    cfg.experiment.T = 0.0; // auto
    CliOptions opts;
    opts.subcommand = "sweep";
    opts.threads = 2;
    opts.out_dir = dir.path.string();
    std::ostringstream out, err;
    opts.out = &out;
    opts.err = &err;
    REQUIRE(run_sweep(cfg, opts) == ExitCode::ok);
    CHECK(out.str().find("auto horizon") != std::string::npos);
    CHECK(fs::exists(dir.path / "scalars.csv"));
}
