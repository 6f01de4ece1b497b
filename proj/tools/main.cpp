#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "config.hpp"
#include "ompath/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Transition-path toolkit: action evaluation, most-probable-path optimization, "
                 "and Monte Carlo tube-probability validation for spectrally diagonal SPDE "
                 "models with tempered-stable jumps"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_file;
    std::string out_dir;
    std::string log_file;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    app.add_option("--config", config_file, "Run configuration file")->required();
    auto* out_opt = app.add_option("--out", out_dir, "Output directory (overrides output.dir)");
    auto* seed_opt = app.add_option("--seed", seed, "RNG seed (overrides the config seed)");
    auto* threads_opt =
        app.add_option("--threads", threads, "Worker cap for sampling (overrides config)");
    auto* log_opt = app.add_option("--log", log_file, "Progress log file (optimizer trajectory)");

    app.add_subcommand("check", "Validate model shape, spectrum, diffusion, drift and jump "
                                "hypotheses; exit 1 if any check fails");
    app.add_subcommand("eta", "Small-jump mean per mode with quadrature error estimates");
    app.add_subcommand("eval", "Evaluate the action of a path file");
    app.add_subcommand("minimize", "Most probable path between fixed endpoints");
    app.add_subcommand("simulate", "Sample mild-solution trajectories and moment summaries");
    app.add_subcommand("tube-ratio", "Monte Carlo tube-probability ratio against the "
                                     "action-difference prediction");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    ompath::cli::CliOverrides overrides;
    overrides.command = app.get_subcommands().front()->get_name();
    if (out_opt->count() > 0) overrides.out_dir = out_dir;
    if (seed_opt->count() > 0) overrides.seed = seed;
    if (threads_opt->count() > 0) {
        if (threads == 0) {
            std::cerr << "config error: --threads must be at least 1\n";
            return 2;
        }
        overrides.threads = threads;
    }
    if (log_opt->count() > 0) overrides.log_file = log_file;

    try {
        const ompath::cli::RunPlan plan = ompath::cli::resolve(config_file, overrides);
        return ompath::cli::run_command(plan);
    } catch (const ompath::precondition_error& e) {
        std::cerr << "precondition violated: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }
}
