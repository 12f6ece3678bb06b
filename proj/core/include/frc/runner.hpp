#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "frc/optimizer.hpp"
#include "frc/problem_io.hpp"

namespace frc {

enum class Command { solve_p, solve_rp, relax_exp, verify, bench };

/* One CLI invocation.  `tol` overrides the problem file's solver tolerance
 * when positive.  `timings` writes measured runtimes into report.csv's
 * runtime_ms column; by default that column is written as 0 so identical
 * seeds give byte-identical files, and wall-clock numbers go to summary.txt
 * only.
 */
struct RunConfig {
    std::string problem_path;
    Command command = Command::relax_exp;
    int grid_n = 64;
    std::vector<int> n_list = {4, 16, 64, 256};
    std::uint64_t seed = 1;
    double tol = 0.0;
    std::string out_dir = ".";
    bool timings = false;
    int chatter_cells = 16;
};

// Executes one command, writing report.csv / solution.csv / summary.txt
// into out_dir and mirroring the summary to `log`.  Returns the process
// exit code: 0 success, 1 error (message on `log`), 2 experiment-failure
// report (monotonicity flags tripped).
int run(const RunConfig& config, std::ostream& log);

// The derived-constant block echoed by every command that loads a problem.
std::string constants_echo(const ProblemSpec& problem);

} // namespace frc
