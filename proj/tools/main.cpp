#include <CLI11.hpp>

#include "thermorel/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"thermorel - thermomechanical reliability and shape optimization"};
    app.require_subcommand(1);

    thermorel::CliOptions opts;
    uint64_t seed = 0;
    double t_max = 0.0;
    int replications = 0;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", opts.config_path, "problem configuration file")->required();
        cmd->add_option("--out", opts.out_dir, "output directory override");
        cmd->add_option("--threads", opts.threads, "worker thread count (0 = auto)");
    };

    CLI::App* solve = app.add_subcommand("solve", "run the thermal/elastic state problem once");
    add_common(solve);

    CLI::App* sample = app.add_subcommand("sample", "Monte Carlo crack-initiation sampling");
    add_common(sample);
    CLI::Option* o_seed = sample->add_option("--seed", seed, "sampling seed");
    CLI::Option* o_tmax = sample->add_option("--t-max", t_max, "time horizon (cycles)");
    CLI::Option* o_reps = sample->add_option("--replications", replications, "replication count");

    CLI::App* optimize = app.add_subcommand("optimize", "shape optimization");
    add_common(optimize);
    CLI::Option* o_oseed = optimize->add_option("--seed", seed, "optimizer seed");
    optimize->add_flag("--resume", opts.resume, "resume from the checkpoint file");

    CLI::App* diagnose = app.add_subcommand("diagnose", "randomized solver diagnostics suite");
    add_common(diagnose);
    CLI::Option* o_dseed = diagnose->add_option("--seed", seed, "shape-suite seed");
    diagnose->add_option("--shapes", opts.n_shapes, "number of random shapes");

    CLI::App* mesh_export = app.add_subcommand("mesh-export", "write the mesh files and exit");
    add_common(mesh_export);

    CLI11_PARSE(app, argc, argv);

    if (o_seed->count() || o_oseed->count() || o_dseed->count()) opts.seed = seed;
    if (o_tmax->count()) opts.t_max = t_max;
    if (o_reps->count()) opts.replications = replications;

    if (solve->parsed()) return thermorel::cmd_solve(opts);
    if (sample->parsed()) return thermorel::cmd_sample(opts);
    if (optimize->parsed()) return thermorel::cmd_optimize(opts);
    if (diagnose->parsed()) return thermorel::cmd_diagnose(opts);
    if (mesh_export->parsed()) return thermorel::cmd_mesh_export(opts);
    return 1;
}
