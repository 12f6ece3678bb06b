#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "frc/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"fractional relaxed-control toolbox"};
    app.get_formatter()->column_width(30);

    frc::RunConfig config;
    std::string command;
    const std::map<std::string, frc::Command> names = {
        {"solve-p", frc::Command::solve_p},   {"solve-rp", frc::Command::solve_rp},
        {"relax-exp", frc::Command::relax_exp}, {"verify", frc::Command::verify},
        {"bench", frc::Command::bench},
    };

    app.add_option("command", command, "solve-p | solve-rp | relax-exp | verify | bench")
        ->required()
        ->check(CLI::IsMember({"solve-p", "solve-rp", "relax-exp", "verify", "bench"}));
    app.add_option("-p,--problem", config.problem_path, "problem description (JSON)");
    app.add_option("--grid", config.grid_n, "cells in the base solver grid")
        ->check(CLI::PositiveNumber);
    app.add_option("--n-list", config.n_list,
                   "comma separated block counts for relax-exp, ascending")
        ->delimiter(',');
    app.add_option("--seed", config.seed, "seed for the discrete search");
    app.add_option("--tol", config.tol, "override the problem file's solver tolerance");
    app.add_option("-o,--out", config.out_dir, "directory for report/solution/summary files");
    app.add_flag("--timings", config.timings,
                 "write measured wall clock into report.csv (off keeps reruns byte-identical)");
    app.add_option("--chatter-cells", config.chatter_cells, "grid cells per chattering block")
        ->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);
    config.command = names.at(command);
    return frc::run(config, std::cout);
}
