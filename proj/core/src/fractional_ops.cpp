#include "frc/fractional_ops.hpp"

#include <cmath>

#include "frc/special_functions.hpp"

namespace frc {

GridFunction rl_integral(const GridFunction& f, double alpha) {
    if (!(alpha > 0.0) || alpha > 1.0)
        throw DomainError("rl_integral: alpha must lie in (0,1]");
    f.check();

    const TimeGrid& g = f.grid;
    const int N = g.cells;
    const double h = g.dt();
    const int dim = f.dim();
    const double inv_gamma = 1.0 / std::tgamma(alpha);

    /* On cell [t_l, t_{l+1}] with d = j - l,
     *   integral (t_j - s)^{a-1} ds            = h^a (d^a - (d-1)^a) / a
     *   integral (t_j - s)^{a-1} (s - t_l) ds  = h^{a+1} [ d (d^a - (d-1)^a)/a
     *                                             - (d^{a+1} - (d-1)^{a+1})/(a+1) ]
     * so the lag-d weights on f_l and f_{l+1} depend only on d.
     */
    std::vector<double> w0(N + 1, 0.0), w1(N + 1, 0.0);
    const double ha = std::pow(h, alpha);
    for (int d = 1; d <= N; ++d) {
        const double da = std::pow(static_cast<double>(d), alpha);
        const double dm = std::pow(static_cast<double>(d - 1), alpha);
        const double da1 = std::pow(static_cast<double>(d), alpha + 1.0);
        const double dm1 = std::pow(static_cast<double>(d - 1), alpha + 1.0);
        const double k0 = ha * (da - dm) / alpha;
        const double k1 = ha * (d * (da - dm) / alpha - (da1 - dm1) / (alpha + 1.0));
        w1[d] = k1; // multiplies the slope (f_{l+1} - f_l)/h, i.e. h cancels
        w0[d] = k0;
    }

    GridFunction out = GridFunction::zero(g, dim);
    for (int j = 1; j <= N; ++j) {
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(dim);
        for (int l = 0; l < j; ++l) {
            const int d = j - l;
            acc.noalias() += w0[d] * f.values[l];
            acc.noalias() += w1[d] * (f.values[l + 1] - f.values[l]);
        }
        out.values[j] = inv_gamma * acc;
    }
    return out;
}

GridFunction caputo_derivative(const GridFunction& x, double alpha) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw DomainError("caputo_derivative: alpha must lie in (0,1)");
    x.check();
    if (x.grid.cells < 2)
        throw DomainError("caputo_derivative: grid too coarse (need >= 2 cells)");

    const TimeGrid& g = x.grid;
    const int N = g.cells;
    const double h = g.dt();
    const int dim = x.dim();

    // L1 scheme: I^{1-a} applied to the piecewise-constant slope.
    // Cell weight integral (t_j - s)^{-a} ds = h^{1-a} (d^{1-a} - (d-1)^{1-a})/(1-a).
    const double c = std::pow(h, 1.0 - alpha) / ((1.0 - alpha) * std::tgamma(1.0 - alpha));
    std::vector<double> w(N + 1, 0.0);
    for (int d = 1; d <= N; ++d)
        w[d] = c * (std::pow(static_cast<double>(d), 1.0 - alpha) -
                    std::pow(static_cast<double>(d - 1), 1.0 - alpha));

    GridFunction out = GridFunction::zero(g, dim);
    for (int j = 1; j <= N; ++j) {
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(dim);
        for (int l = 0; l < j; ++l)
            acc.noalias() += w[j - l] * (x.values[l + 1] - x.values[l]);
        out.values[j] = acc / h;
    }
    return out;
}

GridFunction gronwall_bound(const GridFunction& psi, double lambda, double gamma) {
    if (!(lambda >= 0.0))
        throw DomainError("gronwall_bound: lambda must be nonnegative");
    if (!(gamma >= 0.0) || !(gamma < 1.0))
        throw DomainError("gronwall_bound: gamma must lie in [0,1)");
    psi.check();
    if (psi.dim() != 1)
        throw DimensionError("gronwall_bound: psi must be scalar-valued");

    double prev = -std::numeric_limits<double>::infinity();
    for (const auto& v : psi.values) {
        if (v[0] < 0.0)
            throw DomainError("gronwall_bound: psi must be nonnegative");
        if (v[0] < prev - 1e-12 * std::max(1.0, std::fabs(prev)))
            throw DomainError("gronwall_bound: psi must be nondecreasing");
        prev = std::max(prev, v[0]);
    }

    const double order = 1.0 - gamma;
    const double gfac = std::tgamma(order);
    GridFunction out = GridFunction::zero(psi.grid, 1);
    for (int k = 0; k < psi.grid.nodes(); ++k) {
        const double t = psi.grid.node(k);
        const double arg = lambda * gfac * std::pow(t, order);
        out.values[k][0] = psi.values[k][0] * mittag_leffler(order, 1.0, arg);
    }
    return out;
}

} // namespace frc
