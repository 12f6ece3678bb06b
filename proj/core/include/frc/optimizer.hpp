#pragma once

#include <cstdint>
#include <vector>

#include "frc/mild_solver.hpp"
#include "frc/relaxation.hpp"

namespace frc {

/* Direct transcription of the control problem over piecewise-constant
 * controls: exact functional evaluation, combinatorial search over
 * atom-valued controls, projected-gradient descent over simplex-weight
 * (relaxed) controls, and the chattering experiment connecting the two.
 * The vector of functionals J_1..J_r is ordered by its max (minimax);
 * per-channel values are always reported alongside the aggregate.
 */

struct FunctionalValues {
    std::vector<double> J; // one per channel
    double aggregate = 0.0;
    GridFunction trajectory;
};

// Costs of an atom-valued control: mild solve on the control's grid, then
// per channel the trapezoid rule for the state part at the nodes plus the
// exact cell sums of the control part (piecewise constant).  Rejects
// controls that are not atom-valued.
FunctionalValues evaluate_P(const ProblemSpec& problem, const ControlSignal& controls,
                            const MildOptions& options = {});

// Relaxed costs: mild solve driven by the barycenter signal; the control
// part integrates the envelope value at the barycenter.  Since the state
// part of the cost is constant in u, the envelope of g splits as state part
// plus envelope of q, which is what gets evaluated.
FunctionalValues evaluate_RP(const ProblemSpec& problem, const RelaxedControl& relaxed,
                             const MildOptions& options = {});

struct SolveBudget {
    int restarts = 6;       // random starts for the atom search
    int sweeps = 30;        // coordinate-descent sweeps per start
    int iterations = 300;   // projected-gradient iterations
    std::uint64_t seed = 1;
    MildOptions mild;       // forwarded to every inner mild solve
};

struct SolveReport {
    FunctionalValues values;
    ControlSignal control;       // atom-valued incumbent / barycenter signal
    RelaxedControl relaxed;      // weight solution (relaxed solves only)
    std::vector<double> history; // incumbent aggregate per sweep or iteration
    int iterations = 0;
    bool stalled = false;    // stopped with a sizable gradient and no descent direction
    bool exhaustive = false; // the full atom grid was enumerated
};

/* Best atom-valued control on `grid`.  Enumerates the whole atom grid when
 * |atoms|^(channels*cells) <= 4096, otherwise seeded multi-start coordinate
 * descent over cells (constant-atom starts, random starts, plus the
 * optional warm start, e.g. a coarse incumbent lifted to a finer grid).
 * Best-effort: returns the incumbent, never throws for lack of optimality.
 */
SolveReport solve_P(const ProblemSpec& problem, const TimeGrid& grid,
                    const SolveBudget& budget = {},
                    const ControlSignal* warm_start = nullptr);

// Projected gradient on the simplex weights with forward-difference
// gradients of the transcribed objective sum_cells |cell| sum_j w_j q(u_j)
// plus the state cost of the barycenter-driven trajectory; backtracking
// line search with a coordinate poll fallback.  Deterministic: the start is
// the uniform weight and no randomness is used.
SolveReport solve_RP(const ProblemSpec& problem, const TimeGrid& grid,
                     const SolveBudget& budget = {});

// Forward-difference gradient of the transcribed relaxed objective with
// respect to the flattened weights ([channel][cell][atom]); step <= 0 picks
// 1e-6 * (1 + |w|) per coordinate.
std::vector<double> rp_gradient(const ProblemSpec& problem, const RelaxedControl& relaxed,
                                double step = 0.0, const MildOptions& options = {});

// sup over 0 <= t1 <= t2 <= horizon of
//   sum_i | integral_{t1}^{t2} (g_i**(s, x*(s), u*_i(s)) - g_i(s, x_n(s), u_{i,n}(s))) ds |,
// the window statistic of the chattering experiment, computed from
// cumulative cell integrals on the merged grid.
double window_statistic(const ProblemSpec& problem, const GridFunction& x_star,
                        const RelaxedControl& u_star, const GridFunction& x_n,
                        const ControlSignal& u_n);

struct ConvergenceRow {
    int n_blocks = 0;
    double traj_err_sup = 0.0;   // |x_N - x*|_C
    double weak_norm_dist = 0.0; // sum_i |u_{i,N} - u*_i|_w
    double window_sup = 0.0;     // window statistic above
    double gap = 0.0;            // |max_i J_i(x_N, u_N) - max_i J_i**|
    double runtime_ms = 0.0;
};

struct ExperimentReport {
    SolveReport rp;
    std::vector<ConvergenceRow> rows;
    bool traj_nonincreasing = true;
    bool weak_nonincreasing = true;
    bool window_nonincreasing = true;
    bool gap_nonincreasing = true;
    bool ok = true; // all four columns nonincreasing
};

/* Solves the relaxed problem once on `base_grid`, then for each N in
 * n_list (ascending) builds the N-block chattering control, evaluates the
 * original problem on it, and tabulates trajectory, weak-norm, window and
 * gap columns.  Monotonicity failures set the flags and ok=false; they do
 * not throw.
 */
ExperimentReport relaxation_experiment(const ProblemSpec& problem, const TimeGrid& base_grid,
                                       const std::vector<int>& n_list,
                                       const SolveBudget& budget = {},
                                       int chatter_cells = 16);

} // namespace frc
