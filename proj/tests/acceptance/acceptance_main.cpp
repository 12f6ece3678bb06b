/* Acceptance suite for the toolbox, run at desk scale: ten end-to-end
 * checks covering the propagator oracle pair, the density laws, solver
 * closed forms, the trajectory bound, envelope exactness, the relaxation
 * experiment, the continuity probe, and byte-level determinism of the CLI.
 * Each check prints one [PASS]/[FAIL] line with the measured quantities;
 * the exit code is the number of failures.
 *
 * argv[1]: path to the frc binary (needed by the determinism check).
 */

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "frc/fractional_ops.hpp"
#include "frc/mild_solver.hpp"
#include "frc/optimizer.hpp"
#include "frc/quadrature.hpp"
#include "frc/relaxation.hpp"
#include "frc/sobolev_system.hpp"
#include "frc/special_functions.hpp"
#include "support/benchmark_problem.hpp"
#include "support/oracles.hpp"

using namespace frc;
namespace fs = std::filesystem;
using testbed::scal;

namespace {

int failures = 0;

class Timer {
public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

void report(const char* name, bool pass, const std::string& detail, double secs) {
    if (!pass) ++failures;
    std::printf("[%s] %-34s %s [%.2fs]\n", pass ? "PASS" : "FAIL", name, detail.c_str(),
                secs);
    std::fflush(stdout);
}

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", v);
    return buf;
}

GridFunction sample(const TimeGrid& g, double (*fn)(double)) {
    GridFunction f;
    f.grid = g;
    f.values.reserve(g.nodes());
    for (int k = 0; k <= g.cells; ++k) f.values.push_back(scal(fn(g.node(k))));
    return f;
}

double max_node_error(const GridFunction& f, double (*oracle)(double)) {
    double worst = 0.0;
    for (int k = 0; k <= f.grid.cells; ++k)
        worst = std::max(worst, std::abs(f.values[k](0) - oracle(f.grid.node(k))));
    return worst;
}

// ---------------------------------------------------------------- checks

void check_propagator_pair() {
    Timer timer;
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const OperatorTriple T = oracles::stable_triple(seed);
        for (double alpha : {0.4, 0.6, 0.9}) {
            for (double t : {0.1, 0.5, 1.0, 2.0}) {
                const Matrix dS =
                    s_alpha(T, alpha, t, OperatorMethod::subordination) -
                    s_alpha(T, alpha, t, OperatorMethod::series);
                const Matrix dT =
                    t_alpha(T, alpha, t, OperatorMethod::subordination) -
                    t_alpha(T, alpha, t, OperatorMethod::series);
                worst = std::max({worst, dS.cwiseAbs().maxCoeff(),
                                  dT.cwiseAbs().maxCoeff()});
            }
        }
    }
    const double secs = timer.seconds();
    report("propagator oracle pair", worst <= 1e-6 && secs < 30.0,
           "max route deviation " + sci(worst) + " (bound 1e-06, 10 triples)", secs);
}

void check_density_laws() {
    Timer timer;
    double worst_mass = 0.0, worst_moment = 0.0;
    QuadOptions opt;
    opt.abs_tol = 1e-12;
    opt.rel_tol = 1e-12;
    for (double alpha : {0.3, 0.5, 0.7, 0.9}) {
        const WrightDensity zeta(alpha);
        const double cut = zeta.support_bound(1e-14);
        const double mass =
            integrate_adaptive([&](double th) { return zeta.value_for_quadrature(th); },
                               0.0, cut, opt) +
            zeta.tail_mass(cut);
        const double moment = integrate_adaptive(
            [&](double th) { return th * zeta.value_for_quadrature(th); }, 0.0, cut, opt);
        worst_mass = std::max(worst_mass, std::abs(mass - 1.0));
        worst_moment =
            std::max(worst_moment, std::abs(moment - 1.0 / gamma_fn(1.0 + alpha)));
    }
    const double secs = timer.seconds();
    report("density normalization and moment",
           worst_mass <= 1e-6 && worst_moment <= 1e-6 && secs < 10.0,
           "|mass-1| " + sci(worst_mass) + ", moment dev " + sci(worst_moment) +
               " (bounds 1e-06)",
           secs);
}

void check_mild_closed_form() {
    Timer timer;
    ProblemSpec p = testbed::benchmark();
    p.x0 = scal(0.2);
    auto solve_error = [&](int N) {
        const TimeGrid grid = TimeGrid::uniform(1.0, N);
        const ControlSignal u = ControlSignal::constant(grid, 1, scal(1.0));
        const GridFunction x = solve_mild(p, u, grid);
        return max_node_error(
            x, +[](double t) { return 0.2 + std::sqrt(t) / gamma_fn(1.5); });
    };
    const double e100 = solve_error(100);
    const double e200 = solve_error(200);
    const double ratio = e100 / e200;
    const double secs = timer.seconds();
    // The constant-control instance is integrated exactly (the propagator
    // under the kernel is constant), so both errors sit at rounding level
    // and the refinement ratio carries no signal; that counts as passing.
    const bool exact = e100 <= 1e-12 && e200 <= 1e-12;
    report("mild solver closed form", e200 <= 1e-4 && (ratio >= 1.3 || exact) && secs < 5.0,
           "err(200) " + sci(e200) + " (bound 1e-04), err(100)/err(200) " + sci(ratio) +
               (exact ? " [both at rounding level]" : ""),
           secs);
}

void check_caputo_identities() {
    Timer timer;
    const GridFunction c42 =
        sample(TimeGrid::uniform(1.0, 50), +[](double) { return 4.2; });
    double const_dev = 0.0;
    for (const auto& v : caputo_derivative(c42, 0.5).values)
        const_dev = std::max(const_dev, std::abs(v(0)));

    const GridFunction lin =
        sample(TimeGrid::uniform(1.0, 400), +[](double t) { return t; });
    const double lin_err = max_node_error(
        caputo_derivative(lin, 0.5),
        +[](double t) { return std::sqrt(t) / gamma_fn(1.5); });

    auto quad_err = [](int N) {
        const GridFunction sq =
            sample(TimeGrid::uniform(1.0, N), +[](double t) { return t * t; });
        return max_node_error(caputo_derivative(sq, 0.6), +[](double t) {
            return 2.0 * std::pow(t, 1.4) / gamma_fn(2.4);
        });
    };
    const double q100 = quad_err(100), q200 = quad_err(200), q400 = quad_err(400);
    const bool halves = q100 / q200 >= 2.0 && q200 / q400 >= 2.0;

    const double secs = timer.seconds();
    report("fractional derivative identities",
           const_dev == 0.0 && lin_err <= 5e-3 && halves,
           "constant dev " + sci(const_dev) + " (exact), linear err " + sci(lin_err) +
               " (bound 5e-03), refinement ratios " + sci(q100 / q200) + "/" +
               sci(q200 / q400),
           secs);
}

void check_trajectory_bound() {
    Timer timer;
    const ProblemSpec p = testbed::benchmark();
    const AprioriBound bound = apriori_bound(p);
    const TimeGrid grid = TimeGrid::uniform(1.0, 64);
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        oracles::SplitMix64 rng(seed);
        ControlSignal u = ControlSignal::zero(grid, 1, 1);
        for (int c = 0; c < grid.cells; ++c)
            u.channel[0][c] = p.constraint.atoms[rng.index(2)];
        worst = std::max(worst, solve_mild(p, u, grid).sup_norm());
    }
    const double secs = timer.seconds();
    report("a-priori trajectory bound", worst <= bound.L0 && secs < 30.0,
           "max |x|_C " + sci(worst) + " <= L0 " + sci(bound.L0) + " (50 controls)",
           secs);
}

void check_envelope_brute_force() {
    Timer timer;
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        oracles::SplitMix64 rng(seed);
        const int k = 3 + rng.index(4);
        std::vector<double> us, costs;
        while (static_cast<int>(us.size()) < k) {
            const double cand = rng.uniform(-2.0, 2.0);
            bool clash = false;
            for (double v : us) clash |= std::abs(v - cand) < 1e-3;
            if (!clash) us.push_back(cand);
        }
        EpigraphAtoms pts;
        for (double v : us) {
            pts.u.push_back(scal(v));
            pts.cost.push_back(rng.uniform(-1.0, 1.0));
            costs.push_back(pts.cost.back());
        }
        const EnvelopeFunction env = bipolar_envelope(pts);
        const double lo = *std::min_element(us.begin(), us.end());
        const double hi = *std::max_element(us.begin(), us.end());
        for (int i = 0; i <= 1000; ++i) {
            const double x =
                std::min(hi, std::max(lo, lo + (hi - lo) * i / 1000.0));
            worst = std::max(worst,
                             std::abs(env(x) - oracles::envelope_pairwise_oracle(
                                                   us, costs, x)));
        }
    }
    const double secs = timer.seconds();
    report("envelope vs pairwise brute force", worst <= 1e-10,
           "max deviation " + sci(worst) + " (bound 1e-10, 20 cost vectors)", secs);
}

// The relaxation experiment backs two checks: the gap identity at the
// relaxed optimum and the minimizing-sequence columns.
ExperimentReport run_experiment() {
    const ProblemSpec p = testbed::benchmark();
    return relaxation_experiment(p, TimeGrid::uniform(1.0, 64), {4, 16, 64, 256}, {}, 16);
}

void check_relaxation_identity(const ExperimentReport& rep, double secs) {
    bool strict = true;
    for (std::size_t i = 0; i + 1 < rep.rows.size(); ++i)
        strict &= rep.rows[i + 1].gap < rep.rows[i].gap;
    const double jrp = rep.rp.values.aggregate;
    const double final_gap = rep.rows.back().gap;
    report("relaxation gap identity",
           jrp <= 1e-4 && final_gap <= 1e-2 && strict,
           "J** " + sci(jrp) + " (bound 1e-04), gap(N=256) " + sci(final_gap) +
               " (bound 1e-02), strictly decreasing " + (strict ? "yes" : "no"),
           secs);
}

void check_minimizing_sequence(const ExperimentReport& rep) {
    Timer timer;
    double weak_dev = 0.0;
    for (const auto& row : rep.rows)
        weak_dev = std::max(weak_dev,
                            std::abs(row.weak_norm_dist - 0.5 / row.n_blocks));
    const bool monotone =
        rep.traj_nonincreasing && rep.weak_nonincreasing && rep.window_nonincreasing;
    report("minimizing-sequence columns", monotone && weak_dev <= 1e-12,
           std::string("trajectory/weak/window columns nonincreasing ") +
               (monotone ? "yes" : "no") + ", |weak - 1/(2N)| " + sci(weak_dev) +
               " (bound 1e-12)",
           timer.seconds());
}

void check_continuity_probe() {
    Timer timer;
    const ProblemSpec p = testbed::benchmark();
    const TimeGrid base = TimeGrid::uniform(1.0, 64);
    const RelaxedControl rc = RelaxedControl::uniform(base, 1, p.constraint.atoms);
    std::vector<ControlSignal> family;
    for (int nb : {8, 32, 128, 512, 2048, 8192})
        family.push_back(chattering_sequence(rc, nb, 2));
    const ProbeReport probe = continuity_probe(p, rc.barycenter_signal(), family, base);
    const double secs = timer.seconds();
    report("solution-map continuity probe",
           probe.traj_monotone && probe.final_traj <= 1e-2,
           std::string("trajectory column monotone ") +
               (probe.traj_monotone ? "yes" : "no") + ", final " +
               sci(probe.final_traj) + " (bound 1e-02)",
           secs);
}

void check_determinism(const char* frc_binary) {
    Timer timer;
    if (frc_binary == nullptr) {
        report("byte-identical reports", false, "frc binary path not supplied", 0.0);
        return;
    }
    const fs::path base = fs::temp_directory_path();
    const fs::path dir_a = base / "frc_acc_det_a";
    const fs::path dir_b = base / "frc_acc_det_b";
    std::error_code ec;
    fs::remove_all(dir_a, ec);
    fs::remove_all(dir_b, ec);
    fs::create_directories(dir_a);
    fs::create_directories(dir_b);

    auto invoke = [&](const fs::path& dir) {
        std::ostringstream cmd;
        cmd << frc_binary << " relax-exp --problem " << CONFIG_DIR "/benchmark.json"
            << " --grid 32 --n-list 4,16 --chatter-cells 8 --seed 9 --out "
            << dir.string() << " > " << (dir / "stdout.log").string() << " 2>&1";
        return std::system(cmd.str().c_str());
    };
    const int rc_a = invoke(dir_a);
    const int rc_b = invoke(dir_b);

    auto slurp = [](const fs::path& path) {
        std::ifstream in(path, std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };
    const std::string rep_a = slurp(dir_a / "report.csv");
    const std::string rep_b = slurp(dir_b / "report.csv");
    const bool pass = rc_a == 0 && rc_b == 0 && !rep_a.empty() && rep_a == rep_b;
    const double secs = timer.seconds();
    fs::remove_all(dir_a, ec);
    fs::remove_all(dir_b, ec);
    report("byte-identical reports", pass,
           rep_a == rep_b ? "two seeded runs, report.csv identical"
                          : "report.csv differs between identical runs",
           secs);
}

} // namespace

int main(int argc, char** argv) {
    std::printf("acceptance suite (desk scale)\n");
    const Timer total;

    check_propagator_pair();
    check_density_laws();
    check_mild_closed_form();
    check_caputo_identities();
    check_trajectory_bound();
    check_envelope_brute_force();
    {
        const Timer timer;
        const ExperimentReport rep = run_experiment();
        check_relaxation_identity(rep, timer.seconds());
        check_minimizing_sequence(rep);
    }
    check_continuity_probe();
    check_determinism(argc > 1 ? argv[1] : nullptr);

    std::printf("%d/10 criteria passed in %.1fs\n", 10 - failures, total.seconds());
    return failures;
}
