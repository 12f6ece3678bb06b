#pragma once

#include "frc/special_functions.hpp"

namespace frc {

/* Operator data (L, M, E) for the state equation
 *
 *   L (d/dt)^a [M x](t) + E x(t) = f,
 *
 * with L, M invertible on R^n.  The generator of the underlying semigroup
 * Q(t) = exp(t A) is A = -L^{-1} E M^{-1}; the sign is chosen so that in
 * the scalar case (L = M = 1, E = lambda > 0) the propagators reduce to
 * the completely monotone E_a(-lambda t^a).
 */
struct OperatorTriple {
    int n = 1;
    Matrix L, M, E;

    Matrix L_inv, M_inv, A;
    double C1 = 1.0; // ||L^{-1}||
    double C2 = 1.0; // ||M^{-1}||
    double M0 = 1.0; // sup_t ||Q(t)|| over the sampled range (estimate)

    // Builds the derived members.  M0 is estimated on a geometric sample of
    // [0, time_range]; callers solving on [0, a] should pass a range
    // covering a^alpha times the subordination support.
    static OperatorTriple make(const Matrix& L, const Matrix& M, const Matrix& E,
                               double time_range = 50.0);

    void refresh_m0(double time_range);
};

const Matrix& generator(const OperatorTriple& T);

// Spectral (operator 2-) norm, by singular values.
double operator_norm(const Matrix& X);

enum class OperatorMethod { series, subordination };

/* Solution propagators of the state equation:
 *
 *   S_a(t) = integral_0^inf M^{-1} zeta_a(theta) Q(t^a theta) dtheta
 *   T_a(t) = a * integral_0^inf M^{-1} theta zeta_a(theta) Q(t^a theta) dtheta
 *
 * The moments of zeta_a collapse the integrals to Mittag-Leffler series,
 *
 *   S_a(t) = M^{-1} E_{a,1}(A t^a),   T_a(t) = M^{-1} E_{a,a}(A t^a),
 *
 * which is the default evaluation route.  The subordination route computes
 * the theta-integral by adaptive quadrature against the density and serves
 * as an independent cross-check; both agree to 1e-6 on stable systems.
 */
Matrix s_alpha(const OperatorTriple& T, double alpha, double t,
               OperatorMethod method = OperatorMethod::series,
               SeriesAccuracy acc = {});

Matrix t_alpha(const OperatorTriple& T, double alpha, double t,
               OperatorMethod method = OperatorMethod::series,
               SeriesAccuracy acc = {});

} // namespace frc
