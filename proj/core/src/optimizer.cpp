#include "frc/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

namespace frc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Deterministic 64-bit generator for restart seeds; the standard library's
// distributions are implementation-defined, so modular draws keep runs
// byte-identical across platforms.
std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

void require_fixed(const ProblemSpec& problem, const char* who) {
    if (problem.constraint.rule != FiniteControlSet::StateRule::fixed)
        throw DomainError(std::string(who) +
                          ": state-dependent constraint sets are not searchable");
}

double state_trapezoid(const CostSpec& cost, const GridFunction& x) {
    double total = 0.0;
    const double h = x.grid.dt();
    for (int c = 0; c < x.grid.cells; ++c)
        total += 0.5 * h *
                 (cost.state_part(x.grid.node(c), x.values[c]) +
                  cost.state_part(x.grid.node(c + 1), x.values[c + 1]));
    return total;
}

// Envelope of the control part alone; the state part is constant in u, so
// the envelope of the full cost is the state part plus this.
EnvelopeFunction control_envelope(const CostSpec& cost, const std::vector<Vector>& atoms) {
    EpigraphAtoms pts;
    pts.u = atoms;
    pts.cost.reserve(atoms.size());
    for (const auto& a : atoms) pts.cost.push_back(cost.control_part(a));
    return bipolar_envelope(pts);
}

// Transcribed relaxed objective in Young-measure form: the trajectory is
// driven by the barycenters, the control cost is sum_j w_j q(u_j) per cell.
// Smooth in the weights (unlike the envelope value at the barycenter), which
// is what the finite differences need; at simplex-optimal weights the two
// coincide.
double young_objective(const ProblemSpec& problem, const RelaxedControl& w,
                       const MildOptions& options) {
    const ControlSignal u = w.barycenter_signal();
    const GridFunction x = solve_mild(problem, u, w.grid, options);
    const double h = w.grid.dt();
    double agg = -kInf;
    for (int i = 0; i < problem.channels; ++i) {
        const auto& cost = problem.costs[i];
        std::vector<double> q(w.n_atoms());
        for (int j = 0; j < w.n_atoms(); ++j) q[j] = cost.control_part(w.atoms[j]);
        double ji = state_trapezoid(cost, x);
        for (int c = 0; c < w.grid.cells; ++c) {
            double cell = 0.0;
            for (int j = 0; j < w.n_atoms(); ++j) cell += w.weights[i][c](j) * q[j];
            ji += h * cell;
        }
        agg = std::max(agg, ji);
    }
    return agg;
}

Vector project_simplex(const Vector& v) {
    const int n = static_cast<int>(v.size());
    std::vector<double> u(v.data(), v.data() + n);
    std::sort(u.begin(), u.end(), std::greater<>());
    double cum = 0.0, tau = 0.0;
    for (int j = 0; j < n; ++j) {
        cum += u[j];
        const double t = (cum - 1.0) / (j + 1);
        if (u[j] - t > 0.0) tau = t;
    }
    Vector out(n);
    for (int i = 0; i < n; ++i) out(i) = std::max(v(i) - tau, 0.0);
    return out;
}

void check_atoms_match(const RelaxedControl& relaxed, const ProblemSpec& problem,
                       const char* who) {
    const auto& atoms = problem.constraint.atoms;
    if (relaxed.n_atoms() != static_cast<int>(atoms.size()))
        throw DimensionError(std::string(who) + ": relaxed atom count differs from the constraint");
    for (size_t j = 0; j < atoms.size(); ++j)
        if ((relaxed.atoms[j] - atoms[j]).norm() > 1e-12)
            throw DomainError(std::string(who) + ": relaxed atoms differ from the constraint set");
}

bool nonincreasing_step(double prev, double next) {
    return next <= prev * (1.0 + 1e-12) + 1e-15;
}

} // namespace

// ------------------------------------------------------------- evaluation

FunctionalValues evaluate_P(const ProblemSpec& problem, const ControlSignal& controls,
                            const MildOptions& options) {
    problem.validate();
    require_fixed(problem, "evaluate_P");
    controls.check();
    if (controls.n_channels() != problem.channels)
        throw DimensionError("evaluate_P: control channel count does not match problem");

    const auto& atoms = problem.constraint.atoms;
    for (int i = 0; i < problem.channels; ++i) {
        for (const auto& v : controls.channel[i]) {
            bool hit = false;
            for (const auto& a : atoms)
                if ((v - a).norm() <= 1e-12 * (1.0 + a.norm())) {
                    hit = true;
                    break;
                }
            if (!hit) throw DomainError("evaluate_P: control value is not a constraint atom");
        }
    }

    FunctionalValues out;
    out.trajectory = solve_mild(problem, controls, controls.grid, options);
    const double h = controls.grid.dt();
    out.aggregate = -kInf;
    for (int i = 0; i < problem.channels; ++i) {
        double ji = state_trapezoid(problem.costs[i], out.trajectory);
        for (const auto& v : controls.channel[i]) ji += h * problem.costs[i].control_part(v);
        out.J.push_back(ji);
        out.aggregate = std::max(out.aggregate, ji);
    }
    return out;
}

FunctionalValues evaluate_RP(const ProblemSpec& problem, const RelaxedControl& relaxed,
                             const MildOptions& options) {
    problem.validate();
    require_fixed(problem, "evaluate_RP");
    relaxed.check();
    if (relaxed.n_channels() != problem.channels)
        throw DimensionError("evaluate_RP: channel count does not match problem");
    check_atoms_match(relaxed, problem, "evaluate_RP");

    FunctionalValues out;
    const ControlSignal u = relaxed.barycenter_signal();
    out.trajectory = solve_mild(problem, u, relaxed.grid, options);
    const double h = relaxed.grid.dt();
    out.aggregate = -kInf;
    for (int i = 0; i < problem.channels; ++i) {
        const EnvelopeFunction env = control_envelope(problem.costs[i], relaxed.atoms);
        double ji = state_trapezoid(problem.costs[i], out.trajectory);
        for (int c = 0; c < relaxed.grid.cells; ++c) ji += h * env(relaxed.barycenter(i, c));
        out.J.push_back(ji);
        out.aggregate = std::max(out.aggregate, ji);
    }
    return out;
}

// ---------------------------------------------------------------- solve P

SolveReport solve_P(const ProblemSpec& problem, const TimeGrid& grid,
                    const SolveBudget& budget, const ControlSignal* warm_start) {
    problem.validate();
    require_fixed(problem, "solve_P");
    const auto& atoms = problem.constraint.atoms;
    const int A = static_cast<int>(atoms.size());
    const int r = problem.channels;
    const int N = grid.cells;
    const int slots = r * N;

    auto signal_of = [&](const std::vector<int>& idx) {
        ControlSignal u;
        u.grid = grid;
        u.channel.assign(r, std::vector<Vector>(N));
        for (int i = 0; i < r; ++i)
            for (int c = 0; c < N; ++c) u.channel[i][c] = atoms[idx[i * N + c]];
        return u;
    };

    SolveReport report;
    double best = kInf;
    std::vector<int> best_idx;
    auto consider = [&](const std::vector<int>& idx, const FunctionalValues& fv) {
        if (fv.aggregate < best) {
            best = fv.aggregate;
            best_idx = idx;
            report.values = fv;
        }
    };
    auto eval = [&](const std::vector<int>& idx) {
        return evaluate_P(problem, signal_of(idx), budget.mild);
    };

    if (std::pow(static_cast<double>(A), static_cast<double>(slots)) <= 4096.0) {
        report.exhaustive = true;
        std::vector<int> idx(slots, 0);
        while (true) {
            consider(idx, eval(idx));
            int pos = 0;
            while (pos < slots && ++idx[pos] == A) idx[pos++] = 0;
            if (pos == slots) break;
        }
        report.history.push_back(best);
        report.control = signal_of(best_idx);
        return report;
    }

    // Starting points: every constant-atom control, the warm start mapped to
    // nearest atoms, then seeded random assignments.
    std::vector<std::vector<int>> starts;
    for (int j = 0; j < A; ++j) starts.emplace_back(slots, j);
    if (warm_start) {
        std::vector<int> idx(slots, 0);
        for (int i = 0; i < r; ++i) {
            for (int c = 0; c < N; ++c) {
                const Vector v = warm_start->value(i, grid.midpoint(c));
                int jb = 0;
                for (int j = 1; j < A; ++j)
                    if ((v - atoms[j]).norm() < (v - atoms[jb]).norm()) jb = j;
                idx[i * N + c] = jb;
            }
        }
        starts.push_back(std::move(idx));
    }
    std::uint64_t rng = budget.seed;
    for (int s = 0; s < budget.restarts; ++s) {
        std::vector<int> idx(slots);
        for (int& e : idx) e = static_cast<int>(splitmix64(rng) % A);
        starts.push_back(std::move(idx));
    }

    for (auto& idx : starts) {
        FunctionalValues fv = eval(idx);
        double local = fv.aggregate;
        consider(idx, fv);
        for (int sweep = 0; sweep < budget.sweeps; ++sweep) {
            bool changed = false;
            for (int pos = 0; pos < slots; ++pos) {
                const int cur = idx[pos];
                int arg = cur;
                double val = local;
                FunctionalValues fbest;
                for (int j = 0; j < A; ++j) {
                    if (j == cur) continue;
                    idx[pos] = j;
                    FunctionalValues f = eval(idx);
                    if (f.aggregate < val) {
                        val = f.aggregate;
                        arg = j;
                        fbest = std::move(f);
                    }
                }
                idx[pos] = arg;
                if (arg != cur) {
                    local = val;
                    changed = true;
                    consider(idx, fbest);
                }
            }
            ++report.iterations;
            report.history.push_back(best);
            if (!changed) break;
        }
    }
    report.control = signal_of(best_idx);
    return report;
}

// --------------------------------------------------------------- solve RP

std::vector<double> rp_gradient(const ProblemSpec& problem, const RelaxedControl& relaxed,
                                double step, const MildOptions& options) {
    const int A = relaxed.n_atoms();
    const int r = relaxed.n_channels();
    const int N = relaxed.grid.cells;
    const double f0 = young_objective(problem, relaxed, options);
    std::vector<double> grad(static_cast<size_t>(r) * N * A);
    RelaxedControl w = relaxed;
    size_t k = 0;
    for (int i = 0; i < r; ++i) {
        for (int c = 0; c < N; ++c) {
            for (int j = 0; j < A; ++j, ++k) {
                const double w0 = w.weights[i][c](j);
                const double d = step > 0.0 ? step : 1e-6 * (1.0 + std::abs(w0));
                w.weights[i][c](j) = w0 + d;
                grad[k] = (young_objective(problem, w, options) - f0) / d;
                w.weights[i][c](j) = w0;
            }
        }
    }
    return grad;
}

SolveReport solve_RP(const ProblemSpec& problem, const TimeGrid& grid,
                     const SolveBudget& budget) {
    problem.validate();
    require_fixed(problem, "solve_RP");
    const int A = static_cast<int>(problem.constraint.atoms.size());
    const int r = problem.channels;
    const int N = grid.cells;

    RelaxedControl w = RelaxedControl::uniform(grid, r, problem.constraint.atoms);
    double f = young_objective(problem, w, budget.mild);

    SolveReport report;
    report.history.push_back(f);
    double s = 1.0;
    const double poll_steps[3] = {0.25, 0.05, 0.01};

    for (int it = 1; it <= budget.iterations; ++it) {
        report.iterations = it;
        const std::vector<double> grad = rp_gradient(problem, w, 0.0, budget.mild);

        bool accepted = false;
        double trial = s;
        for (int bt = 0; bt < 45 && !accepted && trial >= 1e-14; ++bt) {
            RelaxedControl cand = w;
            size_t k = 0;
            for (int i = 0; i < r; ++i) {
                for (int c = 0; c < N; ++c) {
                    Vector block = w.weights[i][c];
                    for (int j = 0; j < A; ++j, ++k) block(j) -= trial * grad[k];
                    cand.weights[i][c] = project_simplex(block);
                }
            }
            const double fc = young_objective(problem, cand, budget.mild);
            if (fc < f) {
                w = std::move(cand);
                f = fc;
                s = trial * 1.5;
                accepted = true;
            } else {
                trial *= 0.5;
            }
        }

        if (!accepted) {
            // Coordinate poll toward the simplex vertices before giving up.
            bool improved = false;
            for (double eta : poll_steps) {
                for (int i = 0; i < r && !improved; ++i) {
                    for (int c = 0; c < N && !improved; ++c) {
                        for (int j = 0; j < A && !improved; ++j) {
                            RelaxedControl cand = w;
                            Vector block = (1.0 - eta) * w.weights[i][c];
                            block(j) += eta;
                            cand.weights[i][c] = block;
                            const double fc = young_objective(problem, cand, budget.mild);
                            if (fc < f) {
                                w = std::move(cand);
                                f = fc;
                                s = std::max(eta, 1e-3);
                                improved = true;
                            }
                        }
                    }
                }
                if (improved) break;
            }
            if (!improved) {
                double gmax = 0.0;
                for (double g : grad) gmax = std::max(gmax, std::abs(g));
                report.stalled = gmax > 1e-4 * (1.0 + std::abs(f));
                break;
            }
        }

        report.history.push_back(f);
        if (report.history.size() >= 6) {
            const double then = report.history[report.history.size() - 6];
            if (std::abs(then - f) <= 1e-8 * (1.0 + std::abs(then))) break;
        }
    }

    report.relaxed = std::move(w);
    report.values = evaluate_RP(problem, report.relaxed, budget.mild);
    report.control = report.relaxed.barycenter_signal();
    return report;
}

// -------------------------------------------------------------- chattering

double window_statistic(const ProblemSpec& problem, const GridFunction& x_star,
                        const RelaxedControl& u_star, const GridFunction& x_n,
                        const ControlSignal& u_n) {
    const int r = problem.channels;
    if (u_star.n_channels() != r || u_n.n_channels() != r)
        throw DimensionError("window_statistic: channel count mismatch");

    std::vector<EnvelopeFunction> env;
    env.reserve(r);
    for (int i = 0; i < r; ++i)
        env.push_back(control_envelope(problem.costs[i], u_star.atoms));
    const ControlSignal u_bar = u_star.barycenter_signal();

    std::vector<double> ts;
    for (int k = 0; k <= x_star.grid.cells; ++k) ts.push_back(x_star.grid.node(k));
    for (int k = 0; k <= u_star.grid.cells; ++k) ts.push_back(u_star.grid.node(k));
    for (int k = 0; k <= x_n.grid.cells; ++k) ts.push_back(x_n.grid.node(k));
    for (int k = 0; k <= u_n.grid.cells; ++k) ts.push_back(u_n.grid.node(k));
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    const size_t K = ts.size() - 1;

    std::vector<std::vector<double>> cum(r, std::vector<double>(K + 1, 0.0));
    for (size_t c = 0; c < K; ++c) {
        const double t0 = ts[c], t1 = ts[c + 1];
        const double len = t1 - t0;
        const double mid = 0.5 * (t0 + t1);
        for (int i = 0; i < r; ++i) {
            const auto& cost = problem.costs[i];
            const double env_part =
                0.5 * len * (cost.state_part(t0, x_star.at(t0)) + cost.state_part(t1, x_star.at(t1))) +
                len * env[i](u_bar.value(i, mid));
            const double chat_part =
                0.5 * len * (cost.state_part(t0, x_n.at(t0)) + cost.state_part(t1, x_n.at(t1))) +
                len * cost.control_part(u_n.value(i, mid));
            cum[i][c + 1] = cum[i][c] + (env_part - chat_part);
        }
    }

    if (r == 1) {
        double lo = 0.0, hi = 0.0;
        for (double v : cum[0]) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        return hi - lo;
    }
    double bestv = 0.0;
    for (size_t a = 0; a <= K; ++a) {
        for (size_t b = a + 1; b <= K; ++b) {
            double sum = 0.0;
            for (int i = 0; i < r; ++i) sum += std::abs(cum[i][b] - cum[i][a]);
            bestv = std::max(bestv, sum);
        }
    }
    return bestv;
}

ExperimentReport relaxation_experiment(const ProblemSpec& problem, const TimeGrid& base_grid,
                                       const std::vector<int>& n_list,
                                       const SolveBudget& budget, int chatter_cells) {
    problem.validate();
    if (n_list.empty()) throw DomainError("relaxation_experiment: empty N list");
    for (size_t k = 0; k + 1 < n_list.size(); ++k)
        if (n_list[k] >= n_list[k + 1])
            throw DomainError("relaxation_experiment: N list must be ascending");
    if (n_list.front() < 1) throw DomainError("relaxation_experiment: N must be positive");

    ExperimentReport rep;
    rep.rp = solve_RP(problem, base_grid, budget);
    const GridFunction& x_star = rep.rp.values.trajectory;
    const ControlSignal& u_star = rep.rp.control;

    for (int nb : n_list) {
        const auto tic = std::chrono::steady_clock::now();
        ConvergenceRow row;
        row.n_blocks = nb;
        const ControlSignal u_n = chattering_sequence(rep.rp.relaxed, nb, chatter_cells);
        const FunctionalValues pv = evaluate_P(problem, u_n, budget.mild);
        row.traj_err_sup = sup_distance(pv.trajectory, x_star);
        for (int i = 0; i < problem.channels; ++i)
            row.weak_norm_dist += weak_distance(u_n, u_star, i);
        row.window_sup = window_statistic(problem, x_star, rep.rp.relaxed, pv.trajectory, u_n);
        row.gap = std::abs(pv.aggregate - rep.rp.values.aggregate);
        row.runtime_ms = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - tic)
                             .count();
        if (!rep.rows.empty()) {
            const ConvergenceRow& prev = rep.rows.back();
            rep.traj_nonincreasing &= nonincreasing_step(prev.traj_err_sup, row.traj_err_sup);
            rep.weak_nonincreasing &= nonincreasing_step(prev.weak_norm_dist, row.weak_norm_dist);
            rep.window_nonincreasing &= nonincreasing_step(prev.window_sup, row.window_sup);
            rep.gap_nonincreasing &= nonincreasing_step(prev.gap, row.gap);
        }
        rep.rows.push_back(row);
    }
    rep.ok = rep.traj_nonincreasing && rep.weak_nonincreasing && rep.window_nonincreasing &&
             rep.gap_nonincreasing;
    return rep;
}

} // namespace frc
