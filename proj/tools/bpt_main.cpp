// bpt — command-line driver for the bath-positive decomposition toolkit.
//
//   bpt <subcommand> [--config PATH] [--out DIR] [--seed N] [--jobs N]
//       [--preset NAME] [--verbose]
//
// Subcommands: bplus, dephasing, lat, retro, markov.

#include <CLI11.hpp>

#include "bplus/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"bath-positive decomposition toolkit"};
    app.require_subcommand(1);

    bplus::RunConfig rc;
    for (const char* name : {"bplus", "dephasing", "lat", "retro", "markov"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", rc.config_path, "JSON configuration file");
        sub->add_option("--out", rc.out_dir, "output directory")->capture_default_str();
        sub->add_option("--seed", rc.seed, "RNG seed")->capture_default_str();
        sub->add_option("--jobs", rc.jobs, "parallelism degree")->capture_default_str();
        sub->add_option("--preset", rc.preset, "configuration preset name");
        sub->add_flag("--verbose", rc.verbosity, "echo the resolved configuration");
    }

    CLI11_PARSE(app, argc, argv);
    rc.subcommand = app.get_subcommands().front()->get_name();
    return bplus::run_cli(rc);
}
