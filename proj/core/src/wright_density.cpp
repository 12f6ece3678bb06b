#include "frc/special_functions.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace frc {

WrightDensity::WrightDensity(double alpha, SeriesAccuracy acc)
    : alpha_(alpha), acc_(acc) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw DomainError("WrightDensity: alpha must lie in (0,1)");

    log_coeff_.resize(acc_.max_terms + 1);
    coeff_sign_.resize(acc_.max_terms + 1);
    log_coeff_[0] = 0.0;
    coeff_sign_[0] = 0;
    for (int n = 1; n <= acc_.max_terms; ++n) {
        // c_n = Gamma(a n) sin(n pi a) / (pi (n-1)!), series sign (-1)^{n-1}
        // folded into coeff_sign_.  The sine is reduced mod 2 before scaling
        // by pi so large n does not degrade the angle.
        const double m = std::fmod(static_cast<double>(n) * alpha, 2.0);
        const double s = std::sin(m * M_PI);
        if (s == 0.0) {
            log_coeff_[n] = -std::numeric_limits<double>::infinity();
            coeff_sign_[n] = 0;
            continue;
        }
        log_coeff_[n] = std::lgamma(alpha * n) + std::log(std::fabs(s)) -
                        std::log(M_PI) - std::lgamma(static_cast<double>(n));
        int sgn = s > 0.0 ? 1 : -1;
        if (n % 2 == 0) sgn = -sgn;
        coeff_sign_[n] = sgn;
    }

    asym_q_ = 1.0 / (1.0 - alpha);
    asym_B_ = (1.0 - alpha) * std::pow(alpha, alpha / (1.0 - alpha));
    asym_p_ = (alpha - 0.5) / (1.0 - alpha);
    asym_C_ = 1.0 / std::sqrt(2.0 * M_PI * (1.0 - alpha) *
                              std::pow(alpha, (1.0 - 2.0 * alpha) / (1.0 - alpha)));
}

WrightDensity::Eval WrightDensity::evaluate_series(double theta) const {
    if (!(theta >= 0.0))
        throw DomainError("WrightDensity: theta must be nonnegative");

    const long double lth =
        theta > 0.0 ? std::log(static_cast<long double>(theta)) : 0.0L;

    long double sum = 0.0L, comp = 0.0L, peak = 0.0L;
    long double prev_mag = std::numeric_limits<long double>::max();
    long double last_mag = 0.0L;
    int below_count = 0;
    bool converged = false;

    for (int n = 1; n <= acc_.max_terms; ++n) {
        long double mag;
        if (coeff_sign_[n] == 0) {
            mag = 0.0L;
        } else if (theta == 0.0) {
            mag = n == 1 ? std::exp(static_cast<long double>(log_coeff_[1])) : 0.0L;
        } else {
            mag = std::exp(static_cast<long double>(log_coeff_[n]) + (n - 1) * lth);
        }
        const long double term = coeff_sign_[n] < 0 ? -mag : mag;
        if (mag > peak) peak = mag;

        const long double y = term - comp;
        const long double t = sum + y;
        comp = (t - sum) - y;
        sum = t;

        last_mag = mag;
        // Terms at the rounding floor of the peak cannot move the sum; they
        // are kept out of the decay-envelope tracking so that the exact and
        // near-zero coefficients at integer n*alpha (every other term for
        // alpha = 1/2) do not masquerade as a restart of growth.
        const long double eps_ld = std::numeric_limits<long double>::epsilon();
        const bool immaterial = mag <= eps_ld * peak;
        if (mag <= acc_.rel_tol * std::max(std::fabs(sum), 1e-300L) &&
            (immaterial || mag <= prev_mag)) {
            if (++below_count >= 4) {
                converged = true;
                break;
            }
        } else {
            below_count = 0;
        }
        if (!immaterial && mag > 0.0L) prev_mag = mag;
    }

    Eval out{};
    const long double eps = std::numeric_limits<long double>::epsilon();
    const long double abs_err = eps * peak + last_mag;
    out.value = static_cast<double>(sum);
    out.abs_error = static_cast<double>(abs_err);
    out.rel_error = std::fabs(out.value) > 0.0
                        ? static_cast<double>(abs_err / std::fabs(sum))
                        : std::numeric_limits<double>::infinity();
    out.reliable = converged && out.rel_error <= 1e-8;
    if (!converged) out.abs_error = std::numeric_limits<double>::infinity();
    return out;
}

double WrightDensity::asymptotic(double theta) const {
    if (theta <= 0.0) return 0.0;
    return asym_C_ * std::pow(theta, asym_p_) *
           std::exp(-asym_B_ * std::pow(theta, asym_q_));
}

double WrightDensity::operator()(double theta) const {
    Eval e = evaluate_series(theta);
    if (!e.reliable) {
        std::ostringstream os;
        os << "wright_density: series unreliable at alpha=" << alpha_
           << " theta=" << theta << " (est. rel. error " << e.rel_error
           << "); argument lies in the cancellation-dominated tail";
        throw AccuracyError(os.str(), e.rel_error);
    }
    // Clip the last-bit negative values the series leaves near its zeros.
    return e.value < 0.0 && e.value > -e.abs_error ? 0.0 : e.value;
}

double WrightDensity::value_for_quadrature(double theta) const {
    Eval e = evaluate_series(theta);
    // Absolute certificate: fine for integration even where the relative
    // error is poor, because the value there is negligible.
    if (e.abs_error <= 1e-12)
        return e.value < 0.0 && e.value > -e.abs_error ? 0.0 : e.value;
    return asymptotic(theta);
}

double WrightDensity::tail_mass(double theta) const {
    // integral_theta^inf C t^p exp(-B t^q) dt, integrated numerically on a
    // few decay lengths; the integrand is smooth and rapidly decreasing.
    if (theta <= 0.0) return 1.0;
    const double rate = asym_B_ * asym_q_ * std::pow(theta, asym_q_ - 1.0);
    const double step = 1.0 / std::max(rate, 1e-2);
    // 60-point composite midpoint over ~40 decay lengths is plenty for a
    // bound used only to truncate domains.
    double mass = 0.0;
    const double span = 40.0 * step;
    const int cells = 240;
    const double h = span / cells;
    for (int i = 0; i < cells; ++i)
        mass += asymptotic(theta + (i + 0.5) * h) * h;
    return mass;
}

double WrightDensity::support_bound(double tail) const {
    double hi = 2.0;
    while (tail_mass(hi) > tail && hi < 1e6) hi *= 1.5;
    return hi;
}

double wright_density(double alpha, double theta, SeriesAccuracy acc) {
    return WrightDensity(alpha, acc)(theta);
}

} // namespace frc
