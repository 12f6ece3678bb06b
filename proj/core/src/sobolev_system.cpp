#include "frc/sobolev_system.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

#include "frc/quadrature.hpp"

namespace frc {

namespace {

constexpr double kCondLimit = 1e8;

Matrix checked_inverse(const Matrix& X, const char* name) {
    Eigen::JacobiSVD<Matrix> svd(X);
    const double smin = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    if (!(smin > 0.0) || smax / smin > kCondLimit)
        throw DomainError(std::string(name) +
                          ": matrix is singular or condition number exceeds 1e8");
    return X.fullPivLu().inverse();
}

} // namespace

double operator_norm(const Matrix& X) {
    if (X.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(X);
    return svd.singularValues().maxCoeff();
}

OperatorTriple OperatorTriple::make(const Matrix& L, const Matrix& M,
                                    const Matrix& E, double time_range) {
    const auto n = L.rows();
    if (L.cols() != n || M.rows() != n || M.cols() != n || E.rows() != n ||
        E.cols() != n)
        throw DimensionError("OperatorTriple: L, M, E must be square and same size");

    OperatorTriple T;
    T.n = static_cast<int>(n);
    T.L = L;
    T.M = M;
    T.E = E;
    T.L_inv = checked_inverse(L, "OperatorTriple L");
    T.M_inv = checked_inverse(M, "OperatorTriple M");
    T.A = -T.L_inv * E * T.M_inv;
    T.C1 = operator_norm(T.L_inv);
    T.C2 = operator_norm(T.M_inv);
    T.refresh_m0(time_range);
    return T;
}

void OperatorTriple::refresh_m0(double time_range) {
    if (!(time_range > 0.0))
        throw DomainError("OperatorTriple: M0 sampling range must be positive");
    // ||Q(0)|| = 1; geometric sweep catches transient growth from
    // non-normality before any decay sets in.
    double m0 = 1.0;
    const int samples = 200;
    const double lo = 1e-6;
    for (int i = 0; i <= samples; ++i) {
        const double t = lo * std::pow(time_range / lo, static_cast<double>(i) / samples);
        m0 = std::max(m0, operator_norm((t * A).exp()));
    }
    if (!std::isfinite(m0))
        throw DomainError(
            "OperatorTriple: semigroup norm overflows on the sampled range; "
            "the generator is too unstable for this horizon");
    M0 = m0;
}

const Matrix& generator(const OperatorTriple& T) { return T.A; }

namespace {

Matrix propagator_series(const OperatorTriple& T, double alpha, double beta,
                         double t, SeriesAccuracy acc) {
    const Matrix arg = std::pow(t, alpha) * T.A;
    return T.M_inv * mittag_leffler_matrix(alpha, beta, arg, acc);
}

Matrix propagator_subordination(const OperatorTriple& T, double alpha, double t,
                                bool first_moment, SeriesAccuracy acc) {
    const WrightDensity density(alpha, acc);
    const double ta = std::pow(t, alpha);
    // Beyond theta_max the density mass is below 1e-12; the discarded tail
    // contributes at most M0 * mass.
    const double theta_max = density.support_bound(1e-12);

    auto integrand = [&](double theta) -> Matrix {
        const double w = density.value_for_quadrature(theta);
        const double scale = first_moment ? alpha * theta * w : w;
        return scale * (ta * theta * T.A).exp().eval();
    };

    QuadOptions opt;
    opt.abs_tol = 1e-9;
    opt.rel_tol = 1e-9;
    opt.max_panels = 4000;
    return T.M_inv * integrate_adaptive(integrand, 0.0, theta_max, opt);
}

void check_alpha_time(double alpha, double t) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw DomainError("propagator: alpha must lie in (0,1)");
    if (!(t >= 0.0))
        throw DomainError("propagator: time must be nonnegative");
}

} // namespace

Matrix s_alpha(const OperatorTriple& T, double alpha, double t,
               OperatorMethod method, SeriesAccuracy acc) {
    check_alpha_time(alpha, t);
    if (method == OperatorMethod::series)
        return propagator_series(T, alpha, 1.0, t, acc);
    return propagator_subordination(T, alpha, t, /*first_moment=*/false, acc);
}

Matrix t_alpha(const OperatorTriple& T, double alpha, double t,
               OperatorMethod method, SeriesAccuracy acc) {
    check_alpha_time(alpha, t);
    if (method == OperatorMethod::series)
        return propagator_series(T, alpha, alpha, t, acc);
    return propagator_subordination(T, alpha, t, /*first_moment=*/true, acc);
}

} // namespace frc
