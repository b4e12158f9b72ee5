#include <CLI11.hpp>

#include "oscillakdv/oscillakdv.hpp"

int main(int argc, char** argv) {
    CLI::App app{"oscillakdv: pseudospectral gKdV with a time-oscillating nonlinearity"};
    app.require_subcommand(1);

    oscillakdv::CliOptions opts;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opts.config_path, "run configuration (JSON)")
            ->required();
        sub->add_option("--out", opts.out_dir, "output directory override");
        sub->add_option("--threads", opts.threads, "worker count for sweeps")
            ->envname("OSCILLAKDV_THREADS");
        sub->add_option("--seed", opts.seed, "seed for synthetic test data only");
    };

    CLI::App* simulate = app.add_subcommand("simulate", "run one simulation");
    add_common(simulate);
    simulate->add_option("--resume", opts.resume_path, "continue from a checkpoint file");

    CLI::App* sweep = app.add_subcommand("sweep", "averaging sweep over (omega, t0)");
    add_common(sweep);

    CLI::App* dichotomy =
        app.add_subcommand("dichotomy", "slow/fast oscillation dichotomy study");
    add_common(dichotomy);

    CLI::App* diagnose = app.add_subcommand("diagnose", "norm table for stored snapshots");
    add_common(diagnose);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : oscillakdv::ExitCode::config_error;
    }

    for (CLI::App* sub : {simulate, sweep, dichotomy, diagnose})
        if (sub->parsed()) opts.subcommand = sub->get_name();

    return oscillakdv::run_cli(opts);
}
