#include "frc/mild_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "frc/fractional_ops.hpp"

namespace frc {

namespace {

// Linear interpolation in a (times, values) sample table, clamped at the
// ends.  No samples means the zero function.
Vector sampled_at(const std::vector<double>& ts, const std::vector<Vector>& vs,
                  double t, int n) {
    if (ts.empty()) return Vector::Zero(n);
    if (ts.size() == 1 || t <= ts.front()) return vs.front();
    if (t >= ts.back()) return vs.back();
    const auto it = std::upper_bound(ts.begin(), ts.end(), t);
    const auto j = static_cast<size_t>(it - ts.begin());
    const double w = (t - ts[j - 1]) / (ts[j] - ts[j - 1]);
    return (1.0 - w) * vs[j - 1] + w * vs[j];
}

void check_samples(const std::vector<double>& ts, const std::vector<Vector>& vs,
                   int n, const char* what) {
    if (ts.size() != vs.size())
        throw DimensionError(std::string(what) + ": times and values differ in length");
    for (size_t j = 0; j + 1 < ts.size(); ++j)
        if (!(ts[j] < ts[j + 1]))
            throw DomainError(std::string(what) + ": sample times must increase");
    for (const auto& v : vs)
        if (v.size() != n)
            throw DimensionError(std::string(what) + ": sample dimension mismatch");
}

void check_square_or_empty(const Matrix& X, int n, const char* what) {
    if (X.size() == 0) return;
    if (X.rows() != n || X.cols() != n)
        throw DimensionError(std::string(what) + ": expected a square matrix of the state dimension");
}

// Left limit of a piecewise-constant signal at t: the cell whose interior
// ends at t when t is a boundary, the enclosing cell otherwise.
const Vector& value_left(const ControlSignal& u, int chan, double t) {
    const TimeGrid& g = u.grid;
    int j = static_cast<int>(std::floor(t / g.dt() - 1e-9));
    j = std::clamp(j, 0, g.cells - 1);
    return u.channel[chan][j];
}

} // namespace

// ---------------------------------------------------------------- dynamics

void DynamicsSpec::check(int n, int channels) const {
    check_square_or_empty(C, n, "DynamicsSpec C");
    if (!D.empty() && static_cast<int>(D.size()) != channels)
        throw DimensionError("DynamicsSpec: need one D per control channel (or none)");
    for (const auto& Di : D) check_square_or_empty(Di, n, "DynamicsSpec D");
    check_samples(forcing_times, forcing_values, n, "DynamicsSpec forcing");
    if (!std::isfinite(gain)) throw DomainError("DynamicsSpec: gain must be finite");
}

Vector DynamicsSpec::forcing_at(double t, int n) const {
    return sampled_at(forcing_times, forcing_values, t, n);
}

bool DynamicsSpec::channel_active(int i) const {
    return i < static_cast<int>(D.size()) && D[i].size() > 0;
}

Vector DynamicsSpec::eval(double t, const Vector& x, const std::vector<Vector>& v) const {
    const int n = static_cast<int>(x.size());
    Vector out = forcing_at(t, n);
    if (C.size() > 0) out.noalias() += C * x;
    for (size_t i = 0; i < D.size(); ++i)
        if (D[i].size() > 0) out.noalias() += D[i] * v[i];
    switch (kind) {
    case Nonlinearity::zero:
        break;
    case Nonlinearity::sine:
        out += gain * x.array().sin().matrix();
        break;
    case Nonlinearity::saturation:
        out += gain * (x.array() / (1.0 + x.array().abs())).matrix();
        break;
    }
    return out;
}

double DynamicsSpec::lipschitz_k1() const {
    double k = operator_norm(C) + (kind == Nonlinearity::zero ? 0.0 : std::abs(gain));
    for (const auto& Di : D) k = std::max(k, operator_norm(Di));
    return k;
}

double DynamicsSpec::growth_a1() const {
    double a = 0.0;
    for (const auto& v : forcing_values) a = std::max(a, v.norm());
    return a;
}

double DynamicsSpec::growth_c1() const {
    // The catalog nonlinearities vanish at 0, so the growth slope equals the
    // Lipschitz modulus.
    return lipschitz_k1();
}

// ---------------------------------------------------------------- nonlocal

void NonlocalSpec::check(int n, double horizon) const {
    if (tau.size() != H.size())
        throw DimensionError("NonlocalSpec: one coefficient matrix per sample time");
    for (double t : tau)
        if (!(t >= 0.0 && t <= horizon))
            throw DomainError("NonlocalSpec: trajectory sample time outside [0, horizon]");
    for (const auto& Hk : H) {
        if (Hk.size() == 0 || Hk.rows() != n || Hk.cols() != n)
            throw DimensionError("NonlocalSpec: coefficient matrices must be n x n");
    }
    check_square_or_empty(G, n, "NonlocalSpec G");
    if (G.size() > 0 && !(tau_u >= 0.0 && tau_u <= horizon))
        throw DomainError("NonlocalSpec: control sample time outside [0, horizon]");
}

bool NonlocalSpec::trivial() const { return tau.empty() && G.size() == 0; }

Vector NonlocalSpec::eval(const GridFunction& x, const Vector& y) const {
    Vector out = Vector::Zero(x.dim());
    for (size_t k = 0; k < tau.size(); ++k) out.noalias() += H[k] * x.at(tau[k]);
    if (G.size() > 0) out.noalias() += G * y;
    return out;
}

double NonlocalSpec::lipschitz_k2() const {
    double k = operator_norm(G);
    for (const auto& Hk : H) k += operator_norm(Hk);
    return k;
}

double NonlocalSpec::growth_c2() const {
    double sum_h = 0.0;
    for (const auto& Hk : H) sum_h += operator_norm(Hk);
    return std::max(sum_h, operator_norm(G));
}

// -------------------------------------------------------------------- cost

void CostSpec::check(int n, int m) const {
    check_square_or_empty(P, n, "CostSpec P");
    check_samples(p_times, p_values, n, "CostSpec p");
    if (!std::isfinite(q_scale)) throw DomainError("CostSpec: q_scale must be finite");
    if (q_kind == ControlCost::linear && q_coeff.size() != m)
        throw DimensionError("CostSpec: linear coefficient must have the control dimension");
    if (q_kind == ControlCost::quadratic && q_center.size() != 0 && q_center.size() != m)
        throw DimensionError("CostSpec: quadratic center must have the control dimension");
}

Vector CostSpec::p_at(double t, int n) const { return sampled_at(p_times, p_values, t, n); }

double CostSpec::state_part(double t, const Vector& x) const {
    double g = 0.0;
    if (P.size() > 0) g += x.dot(P * x);
    if (!p_times.empty()) g += p_at(t, static_cast<int>(x.size())).dot(x);
    return g;
}

double CostSpec::control_part(const Vector& u) const {
    switch (q_kind) {
    case ControlCost::zero:
        return 0.0;
    case ControlCost::linear:
        return q_coeff.dot(u);
    case ControlCost::quadratic:
        return q_scale * (q_center.size() > 0 ? (u - q_center).squaredNorm()
                                              : u.squaredNorm());
    case ControlCost::absolute:
        return q_scale * u.lpNorm<1>();
    }
    return 0.0;
}

double CostSpec::lipschitz_k4_state(double radius) const {
    double p_max = 0.0;
    for (const auto& p : p_values) p_max = std::max(p_max, p.norm());
    return 2.0 * operator_norm(P) * radius + p_max;
}

double CostSpec::lipschitz_k4_control(double u_radius, int m) const {
    switch (q_kind) {
    case ControlCost::zero:
        return 0.0;
    case ControlCost::linear:
        return q_coeff.norm();
    case ControlCost::quadratic:
        return 2.0 * std::abs(q_scale) *
               (u_radius + (q_center.size() > 0 ? q_center.norm() : 0.0));
    case ControlCost::absolute:
        return std::abs(q_scale) * std::sqrt(static_cast<double>(m));
    }
    return 0.0;
}

// ----------------------------------------------------------------- problem

void ProblemSpec::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw DomainError("ProblemSpec: alpha must lie in (0,1)");
    if (!(horizon > 0.0)) throw DomainError("ProblemSpec: horizon must be positive");
    if (!(beta > 0.0 && beta < alpha)) {
        std::ostringstream os;
        os << "growth exponent must satisfy 0 < beta < alpha; got beta=" << beta
           << ", alpha=" << alpha;
        throw HypothesisError("H1.3", os.str());
    }
    const int n = triple.n;
    if (x0.size() != n) throw DimensionError("ProblemSpec: x0 has wrong dimension");
    if (channels < 1) throw DomainError("ProblemSpec: need at least one control channel");
    constraint.check();
    const int m = control_dim();
    if (static_cast<int>(B.size()) != channels)
        throw DimensionError("ProblemSpec: need one channel matrix B per channel");
    for (const auto& Bi : B)
        if (Bi.rows() != n || Bi.cols() != m)
            throw DimensionError("ProblemSpec: B must map the control space to the state space");
    dynamics.check(n, channels);
    nonlocal.check(n, horizon);
    if (static_cast<int>(costs.size()) != channels)
        throw DimensionError("ProblemSpec: need one cost per channel");
    for (const auto& g : costs) g.check(n, m);
}

// ----------------------------------------------------------------- signals

ControlSignal ControlSignal::constant(const TimeGrid& grid, int channels,
                                      const Vector& value) {
    ControlSignal u;
    u.grid = grid;
    u.channel.assign(channels, std::vector<Vector>(grid.cells, value));
    return u;
}

ControlSignal ControlSignal::zero(const TimeGrid& grid, int channels, int m) {
    return constant(grid, channels, Vector::Zero(m));
}

Vector ControlSignal::value(int i, double t) const {
    return channel.at(i)[grid.cell_of(t)];
}

void ControlSignal::check() const {
    if (channel.empty()) throw DimensionError("ControlSignal: no channels");
    for (const auto& ch : channel) {
        if (static_cast<int>(ch.size()) != grid.cells)
            throw DimensionError("ControlSignal: cell count does not match grid");
        for (const auto& v : ch)
            if (!v.allFinite()) throw DomainError("ControlSignal: non-finite value");
    }
}

// ------------------------------------------------------------------- solve

double contraction_estimate(const ProblemSpec& problem) {
    const double k1 = problem.dynamics.lipschitz_k1();
    const double k2 = problem.nonlocal.lipschitz_k2();
    const double k3 = problem.constraint.lipschitz_k3();
    double sum_b = 0.0;
    for (int i = 0; i < problem.channels; ++i)
        if (problem.dynamics.channel_active(i)) sum_b += operator_norm(problem.B[i]);
    const auto& T = problem.triple;
    const double m_norm = operator_norm(T.M);
    const double a = problem.horizon;
    return T.C2 * T.M0 * m_norm * k2 +
           T.C1 * T.C2 * T.M0 * k1 * (1.0 + k3 * sum_b) *
               std::pow(a, problem.alpha) / gamma_fn(1.0 + problem.alpha);
}

GridFunction solve_mild(const ProblemSpec& problem, const ControlSignal& controls,
                        const TimeGrid& grid, const MildOptions& options,
                        MildReport* report) {
    problem.validate();
    controls.check();
    if (controls.n_channels() != problem.channels)
        throw DimensionError("solve_mild: control channel count does not match problem");
    if (controls.grid.horizon != problem.horizon || grid.horizon != problem.horizon)
        throw DomainError("solve_mild: grid horizons must match the problem horizon");

    const int n = problem.state_dim();
    const int N = grid.cells;
    const double a = problem.alpha;
    const double h = grid.dt();
    const auto& T = problem.triple;

    // Node propagators and the per-lag kernel blocks
    //   Q[d] = [h^a (d^a - (d-1)^a)/a] * T_a((d - 1/2) h) * L^{-1},
    // the exact cell integral of (t-s)^{a-1} times the midpoint-frozen T_a.
    std::vector<Matrix> s_nodes(N + 1);
    for (int k = 0; k <= N; ++k) s_nodes[k] = s_alpha(T, a, grid.node(k));
    const double ha = std::pow(h, a);
    std::vector<double> qflat(static_cast<size_t>(N + 1) * n * n);
    for (int d = 1; d <= N; ++d) {
        const double w = ha * (std::pow(d, a) - std::pow(d - 1, a)) / a;
        const Matrix Qd = w * (t_alpha(T, a, (d - 0.5) * h) * T.L_inv);
        std::copy(Qd.data(), Qd.data() + n * n, qflat.begin() + static_cast<size_t>(d) * n * n);
    }

    // Channel values B_i u_i at cell midpoints, fixed across sweeps.
    std::vector<std::vector<Vector>> v(problem.channels, std::vector<Vector>(N));
    for (int i = 0; i < problem.channels; ++i)
        for (int j = 0; j < N; ++j)
            v[i][j] = problem.B[i] * controls.value(i, grid.midpoint(j));
    Vector y_nl;
    if (!problem.nonlocal.trivial())
        y_nl = problem.B[problem.channels - 1] *
               controls.value(problem.channels - 1, problem.nonlocal.tau_u);

    GridFunction x;
    x.grid = grid;
    x.values.assign(N + 1, problem.x0);

    MildReport rep;
    rep.contraction_estimate = contraction_estimate(problem);
    rep.contraction_warning = rep.contraction_estimate >= 1.0;

    std::vector<double> fflat(static_cast<size_t>(N) * n);
    std::vector<Vector> varg(problem.channels);
    double prev_update = std::numeric_limits<double>::infinity();
    bool converged = false;

    for (int iter = 1; iter <= options.max_iter; ++iter) {
        Vector head = problem.x0;
        if (!problem.nonlocal.trivial()) head -= problem.nonlocal.eval(x, y_nl);
        head = T.M * head;

        for (int j = 0; j < N; ++j) {
            const Vector xm = 0.5 * (x.values[j] + x.values[j + 1]);
            for (int i = 0; i < problem.channels; ++i) varg[i] = v[i][j];
            const Vector fj = problem.dynamics.eval(grid.midpoint(j), xm, varg);
            std::copy(fj.data(), fj.data() + n, fflat.begin() + static_cast<size_t>(j) * n);
        }

        double update = 0.0;
        std::vector<Vector> next(N + 1);
        for (int k = 0; k <= N; ++k) {
            Vector acc = s_nodes[k] * head;
            double* ap = acc.data();
            for (int d = 1; d <= k; ++d) {
                const double* Qd = qflat.data() + static_cast<size_t>(d) * n * n;
                const double* fj = fflat.data() + static_cast<size_t>(k - d) * n;
                for (int col = 0; col < n; ++col) {
                    const double fv = fj[col];
                    const double* qc = Qd + static_cast<size_t>(col) * n;
                    for (int row = 0; row < n; ++row) ap[row] += qc[row] * fv;
                }
            }
            update = std::max(update, (acc - x.values[k]).norm());
            next[k] = std::move(acc);
        }

        rep.iterations = iter;
        rep.last_update = update;
        if (!std::isfinite(update))
            throw ContractionError("solve_mild: iteration diverged to non-finite values", update);

        if (update > prev_update) {
            // Step halving keeps overshooting iterations from ping-ponging.
            for (int k = 0; k <= N; ++k)
                x.values[k] = 0.5 * (x.values[k] + next[k]);
        } else {
            x.values = std::move(next);
        }
        if (update < options.tol) {
            converged = true;
            break;
        }
        prev_update = update;
    }

    if (report) *report = rep;
    if (!converged) {
        std::ostringstream os;
        os << "solve_mild: no contraction after " << options.max_iter
           << " sweeps (last update " << rep.last_update << ", modulus estimate "
           << rep.contraction_estimate << ")";
        throw ContractionError(os.str(), rep.last_update);
    }
    return x;
}

GridFunction residual(const ProblemSpec& problem, const GridFunction& x,
                      const ControlSignal& controls) {
    const int n = problem.state_dim();
    const int N = x.grid.cells;
    GridFunction mx = x;
    for (auto& val : mx.values) val = problem.triple.M * val;
    const GridFunction dmx = caputo_derivative(mx, problem.alpha);

    GridFunction out = GridFunction::zero(x.grid, n);
    std::vector<Vector> varg(problem.channels);
    for (int k = 1; k <= N; ++k) {
        const double t = x.grid.node(k);
        for (int i = 0; i < problem.channels; ++i)
            varg[i] = problem.B[i] * value_left(controls, i, t);
        Vector r = problem.triple.L * dmx.values[k] - problem.dynamics.eval(t, x.values[k], varg);
        if (problem.triple.E.size() > 0) r.noalias() += problem.triple.E * x.values[k];
        out.values[k] = std::move(r);
    }
    return out;
}

// ------------------------------------------------------------------ bounds

AprioriBound apriori_bound(const ProblemSpec& problem) {
    problem.validate();
    const auto& T = problem.triple;
    const double a = problem.horizon;
    const double al = problem.alpha;
    const double be = problem.beta;

    const double pre = T.C2 * T.M0 * operator_norm(T.M);
    const double conv = T.C1 * T.C2 * T.M0 / gamma_fn(al);
    const double a1 = problem.dynamics.growth_a1();
    const double c1 = problem.dynamics.growth_c1();
    const double a2 = problem.nonlocal.growth_a2();
    const double c2 = problem.nonlocal.growth_c2();
    const double a3 = problem.constraint.growth_a3();
    const double c3 = problem.constraint.growth_c3();
    const double b_last = operator_norm(problem.B[problem.channels - 1]);
    double sum_b = 0.0;
    for (int i = 0; i < problem.channels; ++i)
        if (problem.dynamics.channel_active(i)) sum_b += operator_norm(problem.B[i]);

    // Hoelder factor for the singular convolution against L^{1/beta} data;
    // constants c have |c|_{L^{1/beta}[0,a]} = c * a^beta.
    const double hol =
        std::pow((1.0 - be) / (al - be) * std::pow(a, (al - be) / (1.0 - be)), 1.0 - be);
    const double lp = std::pow(a, be);

    AprioriBound out;
    out.psi0 = pre * (problem.x0.norm() + a2 + c2 * b_last * a3) +
               conv * hol * (a1 * lp + c1 * sum_b * a3 * lp);
    out.k_nonlocal = pre * c2 * (1.0 + c3 * b_last);
    out.lambda = conv * c1 * (1.0 + c3 * sum_b);
    out.kappa = mittag_leffler(al, 1.0, out.lambda * gamma_fn(al) * std::pow(a, al));

    if (out.k_nonlocal * out.kappa >= 1.0) {
        std::ostringstream os;
        os << "apriori_bound: nonlocal term cannot be absorbed; need "
              "k_nl * kappa < 1 but k_nl = "
           << out.k_nonlocal << ", kappa = " << out.kappa;
        throw BoundUnavailableError(os.str());
    }
    out.L0 = out.psi0 * out.kappa / (1.0 - out.k_nonlocal * out.kappa);
    out.phi = a3 + c3 * out.L0;
    return out;
}

// --------------------------------------------------------------- distances

double sup_distance(const GridFunction& a, const GridFunction& b) {
    if (a.dim() != b.dim())
        throw DimensionError("sup_distance: trajectory dimensions differ");
    if (a.grid.horizon != b.grid.horizon)
        throw DomainError("sup_distance: horizons differ");
    std::vector<double> ts;
    ts.reserve(a.grid.nodes() + b.grid.nodes());
    for (int k = 0; k < a.grid.nodes(); ++k) ts.push_back(a.grid.node(k));
    for (int k = 0; k < b.grid.nodes(); ++k) ts.push_back(b.grid.node(k));
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    double m = 0.0;
    for (double t : ts) m = std::max(m, (a.at(t) - b.at(t)).norm());
    return m;
}

double weak_distance(const ControlSignal& a, const ControlSignal& b, int chan) {
    if (a.grid.horizon != b.grid.horizon)
        throw DomainError("weak_distance: horizons differ");
    std::vector<double> ts;
    ts.reserve(a.grid.nodes() + b.grid.nodes());
    for (int k = 0; k < a.grid.nodes(); ++k) ts.push_back(a.grid.node(k));
    for (int k = 0; k < b.grid.nodes(); ++k) ts.push_back(b.grid.node(k));
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    const size_t cells = ts.size() - 1;

    const int m = static_cast<int>(a.channel.at(chan)[0].size());
    if (m == 1) {
        // Scalar fast path: the sup over boundary pairs of |cum_i - cum_j|
        // is the range of the cumulative integral.
        double cum = 0.0, lo = 0.0, hi = 0.0;
        for (size_t c = 0; c < cells; ++c) {
            const double mid = 0.5 * (ts[c] + ts[c + 1]);
            const double diff = a.value(chan, mid)(0) - b.value(chan, mid)(0);
            cum += diff * (ts[c + 1] - ts[c]);
            lo = std::min(lo, cum);
            hi = std::max(hi, cum);
        }
        return hi - lo;
    }

    std::vector<Vector> cum(cells + 1, Vector::Zero(m));
    for (size_t c = 0; c < cells; ++c) {
        const double mid = 0.5 * (ts[c] + ts[c + 1]);
        cum[c + 1] = cum[c] + (a.value(chan, mid) - b.value(chan, mid)) * (ts[c + 1] - ts[c]);
    }
    double best = 0.0;
    for (size_t i = 0; i <= cells; ++i)
        for (size_t j = i + 1; j <= cells; ++j)
            best = std::max(best, (cum[j] - cum[i]).norm());
    return best;
}

ProbeReport continuity_probe(const ProblemSpec& problem, const ControlSignal& u_star,
                             const std::vector<ControlSignal>& sequence,
                             const TimeGrid& star_grid, const MildOptions& options) {
    const GridFunction x_star = solve_mild(problem, u_star, star_grid, options);
    ProbeReport rep;
    rep.traj_monotone = true;
    for (const auto& u_n : sequence) {
        const GridFunction x_n = solve_mild(problem, u_n, u_n.grid, options);
        ProbeRow row;
        for (int i = 0; i < problem.channels; ++i)
            row.weak_dist += weak_distance(u_n, u_star, i);
        row.traj_dist = sup_distance(x_n, x_star);
        if (!rep.rows.empty() &&
            row.traj_dist > rep.rows.back().traj_dist * (1.0 + 1e-12))
            rep.traj_monotone = false;
        rep.rows.push_back(row);
    }
    if (!rep.rows.empty()) rep.final_traj = rep.rows.back().traj_dist;
    return rep;
}

} // namespace frc
