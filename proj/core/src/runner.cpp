#include "frc/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <span>
#include <sstream>

#include "frc/fractional_ops.hpp"
#include "frc/quadrature.hpp"
#include "frc/special_functions.hpp"

namespace frc {

namespace {

// Shortest round-trippable decimal form, for the CSV artifacts.
std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

std::string report_csv(const ExperimentReport& rep, bool timings) {
    std::ostringstream os;
    os << "N,traj_err_sup,weak_norm_dist,gap,runtime_ms\n";
    for (const auto& row : rep.rows)
        os << row.n_blocks << ',' << fmt17(row.traj_err_sup) << ','
           << fmt17(row.weak_norm_dist) << ',' << fmt17(row.gap) << ','
           << fmt17(timings ? row.runtime_ms : 0.0) << '\n';
    return os.str();
}

std::string solution_csv(const GridFunction& x, const ControlSignal& u) {
    std::ostringstream os;
    os << "t";
    for (int j = 0; j < x.dim(); ++j) os << ",x" << j + 1;
    const int m = static_cast<int>(u.channel[0][0].size());
    for (int i = 0; i < u.n_channels(); ++i)
        for (int j = 0; j < m; ++j) os << ",u" << i + 1 << "_" << j + 1;
    os << '\n';
    for (int k = 0; k <= x.grid.cells; ++k) {
        const double t = x.grid.node(k);
        os << fmt17(t);
        for (int j = 0; j < x.dim(); ++j) os << ',' << fmt17(x.values[k](j));
        // Controls are cell values; report the cell left of the node (the
        // first cell at t = 0).
        const double ts = k == 0 ? x.grid.midpoint(0) : x.grid.midpoint(k - 1);
        for (int i = 0; i < u.n_channels(); ++i) {
            const Vector v = u.value(i, ts);
            for (int j = 0; j < m; ++j) os << ',' << fmt17(v(j));
        }
        os << '\n';
    }
    return os.str();
}

struct Stopwatch {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    }
};

// ----------------------------------------------------------------- verify

struct CheckLine {
    std::string name;
    bool pass;
    double measured;
    double bound;
};

void density_checks(std::vector<CheckLine>& out) {
    for (double alpha : {0.3, 0.5, 0.7, 0.9}) {
        const WrightDensity w(alpha);
        const double cut = w.support_bound(1e-14);
        QuadOptions opts;
        opts.abs_tol = 1e-12;
        opts.rel_tol = 1e-12;
        const double mass =
            integrate_adaptive([&](double th) { return w.value_for_quadrature(th); }, 0.0, cut,
                               opts) +
            w.tail_mass(cut);
        const double moment = integrate_adaptive(
            [&](double th) { return th * w.value_for_quadrature(th); }, 0.0, cut, opts);
        std::ostringstream n1, n2;
        n1 << "density mass alpha=" << alpha;
        n2 << "density moment alpha=" << alpha;
        const double e1 = std::abs(mass - 1.0);
        const double e2 = std::abs(moment - 1.0 / gamma_fn(1.0 + alpha));
        out.push_back({n1.str(), e1 <= 1e-6, e1, 1e-6});
        out.push_back({n2.str(), e2 <= 1e-6, e2, 1e-6});
    }
}

void propagator_checks(std::vector<CheckLine>& out) {
    Matrix A(3, 3), R(3, 3);
    A << -1.0, 0.3, 0.0, 0.0, -0.8, 0.2, 0.1, 0.0, -1.2;
    R << 0.1, -0.2, 0.0, 0.05, 0.15, -0.1, 0.0, 0.2, 0.1;
    const Matrix L = Matrix::Identity(3, 3) + 0.3 * R;
    const Matrix M = Matrix::Identity(3, 3) + 0.3 * R.transpose();
    const Matrix E = -L * A * M;
    const OperatorTriple T = OperatorTriple::make(L, M, E);
    double worst = 0.0;
    for (double t : {0.5, 1.0}) {
        worst = std::max(worst, (s_alpha(T, 0.6, t, OperatorMethod::subordination) -
                                 s_alpha(T, 0.6, t, OperatorMethod::series))
                                    .cwiseAbs()
                                    .maxCoeff());
        worst = std::max(worst, (t_alpha(T, 0.6, t, OperatorMethod::subordination) -
                                 t_alpha(T, 0.6, t, OperatorMethod::series))
                                    .cwiseAbs()
                                    .maxCoeff());
    }
    out.push_back({"propagator route agreement", worst <= 1e-6, worst, 1e-6});
}

void caputo_checks(std::vector<CheckLine>& out) {
    const TimeGrid grid = TimeGrid::uniform(1.0, 400);
    GridFunction c = GridFunction::zero(grid, 1);
    for (auto& v : c.values) v(0) = 4.2;
    double worst = 0.0;
    for (const auto& v : caputo_derivative(c, 0.5).values) worst = std::max(worst, std::abs(v(0)));
    out.push_back({"caputo of constant", worst == 0.0, worst, 0.0});

    GridFunction lin = GridFunction::zero(grid, 1);
    for (int k = 0; k <= grid.cells; ++k) lin.values[k](0) = grid.node(k);
    const GridFunction d = caputo_derivative(lin, 0.5);
    const double g32 = gamma_fn(1.5);
    worst = 0.0;
    for (int k = 0; k <= grid.cells; ++k)
        worst = std::max(worst, std::abs(d.values[k](0) - std::sqrt(grid.node(k)) / g32));
    out.push_back({"caputo of t", worst <= 5e-3, worst, 5e-3});
}

int cmd_verify(std::ostream& log) {
    std::vector<CheckLine> checks;
    density_checks(checks);
    propagator_checks(checks);
    caputo_checks(checks);
    bool all = true;
    for (const auto& c : checks) {
        all = all && c.pass;
        log << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << " (measured " << c.measured
            << ", bound " << c.bound << ")\n";
    }
    log << (all ? "verify: all checks passed\n" : "verify: FAILURES above\n");
    return all ? 0 : 1;
}

// ------------------------------------------------------------------ bench

ProblemSpec desk_instance() {
    ProblemSpec p;
    p.alpha = 0.5;
    p.beta = 0.25;
    p.horizon = 1.0;
    p.x0 = Vector::Zero(1);
    p.triple = OperatorTriple::make(Matrix::Identity(1, 1), Matrix::Identity(1, 1),
                                    Matrix::Zero(1, 1));
    p.channels = 1;
    p.B = {Matrix::Identity(1, 1)};
    p.dynamics.D = {Matrix::Identity(1, 1)};
    Vector lo(1), hi(1);
    lo << -1.0;
    hi << 1.0;
    p.constraint.atoms = {lo, hi};
    CostSpec cost;
    cost.P = Matrix::Identity(1, 1);
    p.costs = {cost};
    return p;
}

int cmd_bench(const RunConfig& config, std::ostream& log) {
    std::ostringstream csv;
    csv << "name,ms\n";
    auto line = [&](const std::string& name, double ms) {
        csv << name << ',' << fmt17(ms) << '\n';
        log << name << ": " << ms << " ms\n";
    };
    volatile double sink = 0.0; // keeps the timed loops from being elided

    {
        const WrightDensity w(0.6);
        Stopwatch sw;
        double acc = 0.0;
        for (int i = 0; i < 2000; ++i) acc += w(5.0 * i / 2000.0);
        sink = acc;
        line("wright_density_2000_evals", sw.ms());
    }
    {
        Stopwatch sw;
        double acc = 0.0;
        for (int i = 0; i < 2000; ++i) acc += mittag_leffler(0.7, 1.0, -5.0 + 10.0 * i / 2000.0);
        sink = acc;
        line("mittag_leffler_2000_evals", sw.ms());
    }
    {
        Matrix A(3, 3);
        A << -1.0, 0.3, 0.0, 0.0, -0.8, 0.2, 0.1, 0.0, -1.2;
        const OperatorTriple T =
            OperatorTriple::make(Matrix::Identity(3, 3), Matrix::Identity(3, 3), -A);
        Stopwatch sw;
        double acc = 0.0;
        for (int i = 0; i < 10; ++i)
            acc += s_alpha(T, 0.6, 1.0, OperatorMethod::subordination)(0, 0);
        sink = acc;
        line("propagator_subordination_10_evals", sw.ms());
    }
    {
        const ProblemSpec p = desk_instance();
        const TimeGrid grid = TimeGrid::uniform(1.0, 512);
        Vector one(1);
        one << 1.0;
        const ControlSignal u = ControlSignal::constant(grid, 1, one);
        Stopwatch sw;
        const GridFunction x = solve_mild(p, u, grid);
        sink = x.values.back()(0);
        line("mild_solve_512_cells", sw.ms());
    }
    {
        EpigraphAtoms pts;
        for (int j = 0; j < 6; ++j) {
            Vector u(1);
            u << -1.0 + 0.4 * j;
            pts.u.push_back(u);
            pts.cost.push_back(std::cos(1.7 * j));
        }
        Stopwatch sw;
        double acc = 0.0;
        for (int i = 0; i < 2000; ++i) {
            const EnvelopeFunction env = bipolar_envelope(pts);
            acc += env(0.1);
        }
        sink = acc;
        line("envelope_build_2000", sw.ms());
    }
    {
        const TimeGrid grid = TimeGrid::uniform(1.0, 4096);
        std::vector<Vector> cells(grid.cells, Vector::Zero(1));
        for (int c = 0; c < grid.cells; ++c) cells[c](0) = (c % 2 == 0) ? 1.0 : -1.0;
        Stopwatch sw;
        double acc = 0.0;
        for (int i = 0; i < 100; ++i)
            acc += weak_norm(grid, std::span<const Vector>(cells.data(), cells.size()));
        sink = acc;
        line("weak_norm_4096_cells_100", sw.ms());
    }
    (void)sink;

    std::filesystem::create_directories(config.out_dir);
    write_file(std::filesystem::path(config.out_dir) / "bench.csv", csv.str());
    return 0;
}

// --------------------------------------------------------------- commands

std::string history_tail(const std::vector<double>& h) {
    std::ostringstream os;
    const size_t from = h.size() > 8 ? h.size() - 8 : 0;
    for (size_t i = from; i < h.size(); ++i) os << (i > from ? " " : "") << h[i];
    return os.str();
}

int cmd_solve_p(const RunConfig& config, const ProblemFile& pf, std::ostream& log) {
    const TimeGrid grid = TimeGrid::uniform(pf.problem.horizon, config.grid_n);
    SolveBudget budget;
    budget.seed = config.seed;
    budget.mild = pf.solver;
    Stopwatch sw;
    const SolveReport rep = solve_P(pf.problem, grid, budget);
    const double elapsed = sw.ms();

    std::ostringstream sum;
    sum << std::setprecision(10);
    sum << constants_echo(pf.problem);
    sum << "command: solve-p (grid " << config.grid_n << " cells, seed " << config.seed
        << (rep.exhaustive ? ", exhaustive" : ", multi-start descent") << ")\n";
    for (size_t i = 0; i < rep.values.J.size(); ++i)
        sum << "J_" << i + 1 << " = " << rep.values.J[i] << "\n";
    sum << "aggregate max_i J_i = " << rep.values.aggregate << "\n";
    sum << "incumbent history (tail): " << history_tail(rep.history) << "\n";
    sum << "runtime_ms = " << elapsed << "\n";

    std::filesystem::create_directories(config.out_dir);
    write_file(std::filesystem::path(config.out_dir) / "solution.csv",
               solution_csv(rep.values.trajectory, rep.control));
    write_file(std::filesystem::path(config.out_dir) / "summary.txt", sum.str());
    log << sum.str();
    return 0;
}

int cmd_solve_rp(const RunConfig& config, const ProblemFile& pf, std::ostream& log) {
    const TimeGrid grid = TimeGrid::uniform(pf.problem.horizon, config.grid_n);
    SolveBudget budget;
    budget.seed = config.seed;
    budget.mild = pf.solver;
    Stopwatch sw;
    const SolveReport rep = solve_RP(pf.problem, grid, budget);
    const double elapsed = sw.ms();

    std::ostringstream sum;
    sum << std::setprecision(10);
    sum << constants_echo(pf.problem);
    sum << "command: solve-rp (grid " << config.grid_n << " cells, " << rep.iterations
        << " iterations" << (rep.stalled ? ", stalled" : "") << ")\n";
    for (size_t i = 0; i < rep.values.J.size(); ++i)
        sum << "J_" << i + 1 << "** = " << rep.values.J[i] << "\n";
    sum << "aggregate max_i J_i** = " << rep.values.aggregate << "\n";
    sum << "objective history (tail): " << history_tail(rep.history) << "\n";
    sum << "runtime_ms = " << elapsed << "\n";

    std::filesystem::create_directories(config.out_dir);
    write_file(std::filesystem::path(config.out_dir) / "solution.csv",
               solution_csv(rep.values.trajectory, rep.control));
    write_file(std::filesystem::path(config.out_dir) / "summary.txt", sum.str());
    log << sum.str();
    return 0;
}

int cmd_relax_exp(const RunConfig& config, const ProblemFile& pf, std::ostream& log) {
    const TimeGrid grid = TimeGrid::uniform(pf.problem.horizon, config.grid_n);
    SolveBudget budget;
    budget.seed = config.seed;
    budget.mild = pf.solver;
    const ExperimentReport rep = relaxation_experiment(pf.problem, grid, config.n_list, budget,
                                                       config.chatter_cells);

    std::ostringstream sum;
    sum << std::setprecision(10);
    sum << constants_echo(pf.problem);
    sum << "command: relax-exp (base grid " << config.grid_n << " cells, "
        << config.chatter_cells << " cells per block)\n";
    for (size_t i = 0; i < rep.rp.values.J.size(); ++i)
        sum << "J_" << i + 1 << "** = " << rep.rp.values.J[i] << "\n";
    sum << "aggregate max_i J_i** = " << rep.rp.values.aggregate << "\n";
    sum << "N traj_err_sup weak_norm_dist window_sup gap runtime_ms\n";
    for (const auto& row : rep.rows)
        sum << row.n_blocks << " " << row.traj_err_sup << " " << row.weak_norm_dist << " "
            << row.window_sup << " " << row.gap << " " << row.runtime_ms << "\n";
    sum << "columns nonincreasing: traj=" << rep.traj_nonincreasing
        << " weak=" << rep.weak_nonincreasing << " window=" << rep.window_nonincreasing
        << " gap=" << rep.gap_nonincreasing << "\n";
    if (!config.timings)
        sum << "report.csv runtime_ms column written as 0 (pass --timings for wall clock)\n";
    sum << (rep.ok ? "experiment ok\n" : "EXPERIMENT FAILURE: a column increased\n");

    std::filesystem::create_directories(config.out_dir);
    write_file(std::filesystem::path(config.out_dir) / "report.csv",
               report_csv(rep, config.timings));
    write_file(std::filesystem::path(config.out_dir) / "solution.csv",
               solution_csv(rep.rp.values.trajectory, rep.rp.control));
    write_file(std::filesystem::path(config.out_dir) / "summary.txt", sum.str());
    log << sum.str();
    return rep.ok ? 0 : 2;
}

} // namespace

std::string constants_echo(const ProblemSpec& p) {
    std::ostringstream os;
    os << std::setprecision(10);
    os << "alpha = " << p.alpha << ", beta = " << p.beta << ", horizon = " << p.horizon
       << "\n";
    os << "n = " << p.state_dim() << ", r = " << p.channels << ", m = " << p.control_dim()
       << ", atoms = " << p.constraint.atoms.size() << "\n";
    os << "C1 = " << p.triple.C1 << ", C2 = " << p.triple.C2 << ", M0 = " << p.triple.M0
       << "\n";
    os << "k1 = " << p.dynamics.lipschitz_k1() << ", k2 = " << p.nonlocal.lipschitz_k2()
       << ", k3 = " << p.constraint.lipschitz_k3() << "\n";
    os << "contraction estimate = " << contraction_estimate(p) << "\n";
    try {
        const AprioriBound b = apriori_bound(p);
        os << "L0 = " << b.L0 << ", phi = " << b.phi << " (psi0 = " << b.psi0
           << ", lambda = " << b.lambda << ", kappa = " << b.kappa
           << ", k_nl = " << b.k_nonlocal << ")\n";
    } catch (const BoundUnavailableError& e) {
        os << "L0 unavailable: " << e.what() << "\n";
    }
    return os.str();
}

int run(const RunConfig& config, std::ostream& log) {
    try {
        if (config.command == Command::verify) return cmd_verify(log);
        if (config.command == Command::bench) return cmd_bench(config, log);

        if (config.grid_n < 2) throw DomainError("run: grid must have at least 2 cells");
        ProblemFile pf = load_problem(config.problem_path);
        if (config.tol > 0.0) pf.solver.tol = config.tol;
        log << "loaded " << config.problem_path << "\n";

        switch (config.command) {
        case Command::solve_p:
            return cmd_solve_p(config, pf, log);
        case Command::solve_rp:
            return cmd_solve_rp(config, pf, log);
        case Command::relax_exp:
            return cmd_relax_exp(config, pf, log);
        default:
            break;
        }
        throw DomainError("run: unknown command");
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace frc
