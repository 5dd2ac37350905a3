// Command-line front-end: gibbs <command> --config <path> [--out <dir>]
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "gibbs/gibbs.h"

int main(int argc, char** argv)
{
    CLI::App app{"Generalized Gibbs states: spectra, solves, sweeps and invariant checks"};
    app.set_version_flag("--version", gibbs_version());

    std::string command;
    std::string config;
    std::string out = ".";
    app.add_option("command", command, "spectrum, solve, sweep, eqf, global-min, weyl, fit or check")
        ->required()
        ->check(CLI::IsMember({"spectrum", "solve", "sweep", "eqf", "global-min", "weyl", "fit", "check"}));
    app.add_option("--config", config, "INI configuration file")->required();
    app.add_option("--out", out, "directory for the CSV and JSON reports");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    int status = 0;
    if (gibbs_run_command(command.c_str(), config.c_str(), out.c_str(), &status) != GIBBS_OK) {
        std::fprintf(stderr, "error: %s\n", gibbs_last_error());
        return 3;
    }
    return status;
}
