#pragma once

#include <Eigen/Dense>
#include <vector>

#include "frc/errors.hpp"

namespace frc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct SeriesAccuracy {
    double rel_tol = 1e-12;
    int max_terms = 2000;
};

// Gamma(x) for x > 0.  Throws DomainError for x <= 0 and for x large enough
// to overflow double (x > 171.62).
double gamma_fn(double x);
double log_gamma(double x);

/* Two-parameter Mittag-Leffler function
 *
 *   E_{alpha,beta}(z) = sum_{n>=0} z^n / Gamma(alpha*n + beta)
 *
 * summed directly with compensated accumulation in extended precision.
 * Alternating arguments lose digits to cancellation; the evaluation tracks
 * the largest partial term, and deep on the negative real axis (alpha < 1)
 * it hands over to the algebraic large-|z| expansion at optimal truncation.
 * In the crossover band neither route may certify the requested tolerance;
 * the better result is returned while its certified relative error stays
 * below 1e-9, and beyond that the evaluation throws AccuracyError rather
 * than returning garbage.  alpha = beta = 1 short-circuits to exp.
 *
 * alpha in (0,2], beta > 0, |z| <= 100.
 */
double mittag_leffler(double alpha, double beta, double z,
                      SeriesAccuracy acc = {});

// Matrix argument version, alpha in (0,1], spectral norm of A bounded at
// desk scale.  Truncation controlled by a scalar majorant tail bound on
// ||A||: the remainder after N terms is below 1e-9 in Frobenius norm.
Matrix mittag_leffler_matrix(double alpha, double beta, const Matrix& A,
                             SeriesAccuracy acc = {});

/* Probability density of the time-subordination variable:
 *
 *   zeta_a(theta) = sum_{n>=1} (-1)^{n-1} theta^{n-1} Gamma(a*n)
 *                   sin(n*pi*a) / (pi * (n-1)!),   theta > 0, a in (0,1),
 *
 * which is nonnegative, integrates to 1, and has first moment
 * 1/Gamma(1+a).  The series is entire but suffers catastrophic
 * cancellation in the far tail; beyond the reliable region evaluation
 * switches to the saddle-point form
 *
 *   zeta_a(theta) ~ Ct * theta^p * exp(-B * theta^q),
 *   q = 1/(1-a),  B = (1-a)*a^{a/(1-a)},  p = (a-1/2)/(1-a),
 *   Ct = 1/sqrt(2*pi*(1-a)*a^{(1-2a)/(1-a)}).
 *
 * The strict entry point wright_density() refuses (AccuracyError) where the
 * series cannot certify the requested relative accuracy; WrightDensity
 * additionally exposes the tail continuation for quadrature use, where only
 * absolute accuracy matters.
 */
class WrightDensity {
public:
    explicit WrightDensity(double alpha, SeriesAccuracy acc = {});

    double alpha() const { return alpha_; }

    // Series value with certified relative error; throws AccuracyError
    // outside the reliable region.
    double operator()(double theta) const;

    // Series while the absolute error certificate holds, saddle-point tail
    // beyond.  Intended for integration; pointwise relative accuracy in the
    // crossover region is a few percent where the density is ~1e-6.
    double value_for_quadrature(double theta) const;

    // Upper bound for the integral of the density over (theta, infinity),
    // from the saddle-point form.  Used to truncate integration domains.
    double tail_mass(double theta) const;

    // theta beyond which tail_mass is below the given mass.
    double support_bound(double tail) const;

    struct Eval {
        double value;
        double abs_error;   // certified absolute error estimate of the series
        double rel_error;   // abs_error / |value|
        bool reliable;      // rel_error <= requested tolerance
    };
    Eval evaluate_series(double theta) const;

    double asymptotic(double theta) const;

private:
    double alpha_;
    SeriesAccuracy acc_;
    // ln |c_n| and sign of c_n = Gamma(a*n)*sin(n*pi*a)/(pi*(n-1)!)
    std::vector<double> log_coeff_;
    std::vector<int> coeff_sign_;
    double asym_B_, asym_q_, asym_p_, asym_C_;
};

double wright_density(double alpha, double theta, SeriesAccuracy acc = {});

} // namespace frc
