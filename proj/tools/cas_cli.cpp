// cas_cli: run a configured experiment and write its artifacts.

#include "cas/experiment.hpp"

#include <CLI/CLI.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    namespace ex = cas::experiment;

    std::string modes;
    for (const auto& m : ex::mode_names())
        modes += "  " + m + "\n";

    CLI::App app{"Limits of communication-assisted sensing.\n\nModes (set \"mode\" in the config):\n" + modes};
    app.allow_extras(false);

    std::string config;
    std::uint64_t seed = 0;
    std::string out_dir;
    std::size_t trials = 0;
    int grid = 0;
    bool bits = false;

    app.add_option("--config", config, "JSON experiment config")->required()->check(CLI::ExistingFile);
    auto* seed_opt = app.add_option("--seed", seed, "override the top-level seed");
    auto* out_opt = app.add_option("--out", out_dir, "output directory");
    auto* trials_opt = app.add_option("--trials", trials, "Monte Carlo trials (simulate)");
    auto* grid_opt = app.add_option(
        "--grid", grid, "grid resolution: power splits for trm-sw/snr-sweep, 1/step of d_s for discrete-tradeoff");
    app.add_flag("--bits", bits, "report rates in bits instead of nats");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp& e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError& e)
    {
        app.exit(e);
        return 2;
    }

    ex::Overrides o;
    if (*seed_opt)
        o.seed = seed;
    if (*out_opt)
        o.out_dir = out_dir;
    if (*trials_opt)
        o.trials = trials;
    if (*grid_opt)
        o.grid = grid;
    o.bits = bits;
    return ex::run_file(config, o, std::cout, std::cerr);
}
