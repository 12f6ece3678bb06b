#pragma once

#include <vector>

#include "frc/control_geometry.hpp"
#include "frc/grid.hpp"
#include "frc/sobolev_system.hpp"

namespace frc {

/* Nonlinear singular Volterra solver for the controlled system
 *
 *   L (d/dt)^a [M x](t) + E x(t) = f(t, x(t), B_1 u_1(t), ..., B_r u_r(t)),
 *   x(0) + h(x, B_r u_r) = x0,
 *
 * in mild (fixed-point) form
 *
 *   x(t) = S_a(t) M [x0 - h(x, B_r u_r)]
 *        + integral_0^t (t-s)^{a-1} T_a(t-s) L^{-1} f(s, x(s), ...) ds.
 *
 * f and h come from small declarative catalogs, so the Lipschitz and growth
 * constants required by the a-priori estimate are derived rather than
 * user-asserted.
 */

// Catalog nonlinearity applied componentwise inside the dynamics.
enum class Nonlinearity { zero, sine, saturation };

/* Dynamics  f(t, x, v_1..v_r) = F0(t) + C x + sum_i D_i v_i + nu(x), with
 * v_i = B_i u_i.  F0 is sampled at forcing_times and interpolated linearly;
 * no samples means no forcing.  nu is gain*sin(x_j) or gain*x_j/(1+|x_j|)
 * per component; both satisfy |nu(x)| <= |gain| |x| with Lipschitz modulus
 * |gain|.  A zero-sized C or D_i stands for the zero matrix.
 */
struct DynamicsSpec {
    Matrix C;
    std::vector<Matrix> D; // one per control channel
    Nonlinearity kind = Nonlinearity::zero;
    double gain = 0.0;
    std::vector<double> forcing_times;
    std::vector<Vector> forcing_values;

    void check(int n, int channels) const;
    Vector forcing_at(double t, int n) const;
    Vector eval(double t, const Vector& x, const std::vector<Vector>& v) const;
    bool channel_active(int i) const;

    double lipschitz_k1() const; // max(||C|| + |gain|, max_i ||D_i||)
    double growth_a1() const;    // sup_t ||F0(t)||
    double growth_c1() const;    // slope in |f| <= a1 + c1 (|x| + sum |v_i|)
};

/* Nonlocal term  h(x, y) = sum_k H_k x(tau_k) + G y  with y = B_r u_r(tau_u).
 * Empty sample lists and a zero-sized G give h = 0 (plain Cauchy data).
 */
struct NonlocalSpec {
    std::vector<double> tau;
    std::vector<Matrix> H;
    double tau_u = 0.0;
    Matrix G;

    void check(int n, double horizon) const;
    bool trivial() const;
    Vector eval(const GridFunction& x, const Vector& y) const;

    double lipschitz_k2() const; // sum_k ||H_k|| + ||G||
    double growth_a2() const { return 0.0; }
    double growth_c2() const;    // max(sum_k ||H_k||, ||G||)
};

// Per-channel running cost g(t, x, u) = x'P x + p(t)'x + q(u); the control
// part q comes from a catalog so its Lipschitz modulus over the control hull
// is computable exactly.
enum class ControlCost { zero, linear, quadratic, absolute };

struct CostSpec {
    Matrix P; // zero-sized means no quadratic state cost
    std::vector<double> p_times;
    std::vector<Vector> p_values;
    ControlCost q_kind = ControlCost::zero;
    Vector q_coeff;       // linear: q(u) = q_coeff . u
    Vector q_center;      // quadratic: q(u) = q_scale * |u - q_center|^2
    double q_scale = 1.0; // quadratic / absolute scale

    void check(int n, int m) const;
    Vector p_at(double t, int n) const;
    double state_part(double t, const Vector& x) const;
    double control_part(const Vector& u) const;

    // |g(t,x,u)-g(t,y,w)| <= k4_state |x-y| + k4_control |u-w| for states in
    // the radius-`radius` ball and controls in the radius-`u_radius` ball of
    // R^m (the absolute cost needs m for its 1-norm/2-norm bridge).
    double lipschitz_k4_state(double radius) const;
    double lipschitz_k4_control(double u_radius, int m) const;
};

/* One full problem instance.  `channels` is the number r of control
 * channels; the nonlocal term samples channel r, the dynamics may couple to
 * any channel through its D matrices.  beta in (0, alpha) is the growth
 * exponent; the weak norm lives in L^{1/beta}.
 */
struct ProblemSpec {
    double alpha = 0.5;
    double beta = 0.25;
    double horizon = 1.0;
    Vector x0;
    OperatorTriple triple;
    int channels = 1;
    std::vector<Matrix> B; // n x m, one per channel
    DynamicsSpec dynamics;
    NonlocalSpec nonlocal;
    std::vector<CostSpec> costs; // one per channel
    FiniteControlSet constraint;

    int state_dim() const { return triple.n; }
    int control_dim() const { return constraint.dim(); }

    // Throws HypothesisError naming the violated clause (e.g. "H1.3" when
    // beta >= alpha), DimensionError on shape mismatches, DomainError on
    // out-of-range scalars.
    void validate() const;
};

// Piecewise-constant control signal: one value in R^m per grid cell and
// channel.  Values are plain vectors; whether they are atoms of U or hull
// points is the caller's concern.
struct ControlSignal {
    TimeGrid grid;
    std::vector<std::vector<Vector>> channel; // [channel][cell]

    static ControlSignal constant(const TimeGrid& grid, int channels,
                                  const Vector& value);
    static ControlSignal zero(const TimeGrid& grid, int channels, int m);

    int n_channels() const { return static_cast<int>(channel.size()); }
    Vector value(int i, double t) const;
    void check() const;
};

struct MildOptions {
    double tol = 1e-10;
    int max_iter = 100;
};

// Diagnostics from one solve.  contraction_estimate is the crude modulus
//   C2 M0 ||M|| k2 + C1 C2 M0 k1 (1 + k3 sum_i ||B_i||) a^alpha/Gamma(1+a);
// the warning flag is set when it reaches 1.  The estimate is sufficient,
// not necessary: the iteration may still converge past it.
struct MildReport {
    int iterations = 0;
    double last_update = 0.0;
    double contraction_estimate = 0.0;
    bool contraction_warning = false;
};

double contraction_estimate(const ProblemSpec& problem);

// Successive approximation on `grid`, with the kernel (t-s)^{a-1} integrated
// exactly per cell and T_a frozen at cell midpoints.  Controls may live on a
// different grid; they are sampled at cell midpoints.  The update is damped
// by 1/2 whenever its sup norm grows.  Throws ContractionError (carrying the
// last update norm) if max_iter sweeps do not reach tol.
GridFunction solve_mild(const ProblemSpec& problem, const ControlSignal& controls,
                        const TimeGrid& grid, const MildOptions& options = {},
                        MildReport* report = nullptr);

// Pointwise defect L (d/dt)^a [M x] + E x - f at the grid nodes, using the
// sampled-slope derivative scheme of caputo_derivative.  Node 0 has no
// backward stencil and reports zero; controls are sampled just left of each
// node.
GridFunction residual(const ProblemSpec& problem, const GridFunction& x,
                      const ControlSignal& controls);

// Everything the trajectory bound produces.  L0 dominates |x|_C over all
// admissible controls; phi = a3 + c3 L0 bounds the control values once the
// state argument is radially retracted.
struct AprioriBound {
    double L0 = 0.0;
    double phi = 0.0;
    double psi0 = 0.0;        // control-independent forcing level
    double lambda = 0.0;      // coefficient of the singular convolution term
    double kappa = 0.0;       // E_a(lambda Gamma(a) a^a)
    double k_nonlocal = 0.0;  // coefficient of |x|_C contributed by h
};

/* Builds L0 by the singular Gronwall route.  The mild form and the growth
 * data give
 *
 *   |x(t)| <= psi0 + k_nl |x|_C + lambda integral_0^t (t-s)^{a-1} |x(s)| ds,
 *
 * where the a1/a3 terms enter psi0 through the Hoelder factor
 * [ (1-b)/(a-b) * a^{(a-b)/(1-b)} ]^{1-b} against their L^{1/b} norms.  With
 * kappa = E_a(lambda Gamma(a) a^a) this yields
 *
 *   |x|_C <= psi0 * kappa / (1 - k_nl * kappa),
 *
 * provided k_nl * kappa < 1; throws BoundUnavailableError otherwise.
 */
AprioriBound apriori_bound(const ProblemSpec& problem);

// Empirical check that weak-norm control convergence forces sup-norm
// trajectory convergence.  Each row pairs sum_i |u_{i,n} - u_i*|_w with
// |x_n - x*|_C; signals may live on unrelated grids.
struct ProbeRow {
    double weak_dist = 0.0;
    double traj_dist = 0.0;
};

struct ProbeReport {
    std::vector<ProbeRow> rows;
    bool traj_monotone = false; // trajectory column nonincreasing
    double final_traj = 0.0;
};

ProbeReport continuity_probe(const ProblemSpec& problem, const ControlSignal& u_star,
                             const std::vector<ControlSignal>& sequence,
                             const TimeGrid& star_grid, const MildOptions& options = {});

// Exact sup-norm distance between two piecewise-linear trajectories on
// possibly different grids (the sup of a piecewise-linear difference is
// attained at a breakpoint of either grid).
double sup_distance(const GridFunction& a, const GridFunction& b);

// Weak-norm distance sup_{t1<=t2} |integral_{t1}^{t2} (a_i - b_i)| between
// one channel of two piecewise-constant signals on possibly different grids,
// from cumulative sums at merged cell boundaries.
double weak_distance(const ControlSignal& a, const ControlSignal& b, int chan);

} // namespace frc
