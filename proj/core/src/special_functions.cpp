#include "frc/special_functions.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace frc {

namespace {
// Gamma(172) overflows IEEE double.
constexpr double kGammaOverflow = 171.62;
} // namespace

double gamma_fn(double x) {
    if (!(x > 0.0))
        throw DomainError("gamma_fn: argument must be positive");
    if (x > kGammaOverflow)
        throw DomainError("gamma_fn: argument exceeds overflow threshold 171.62");
    return std::tgamma(x);
}

double log_gamma(double x) {
    if (!(x > 0.0))
        throw DomainError("log_gamma: argument must be positive");
    return std::lgamma(x);
}

namespace {

struct MlEval {
    long double value = 0.0L;
    double rel_error = std::numeric_limits<double>::infinity();
    bool converged = false;
};

// Power series sum_{n} z^n / Gamma(alpha n + beta), Kahan-compensated in
// long double with the largest term tracked through logs; rel_error is the
// cancellation certificate eps*peak/|sum|.
MlEval ml_series(double alpha, double beta, double z, const SeriesAccuracy& acc) {
    MlEval out;
    long double sum = 0.0L, comp = 0.0L, peak = 0.0L;
    const long double lz = std::fabs(z) > 0.0 ? std::log(std::fabs(z)) : 0.0L;
    const int sign_z = z < 0.0 ? -1 : 1;

    int below_count = 0;
    long double prev_mag = std::numeric_limits<long double>::max();
    long double last_mag = 0.0L;
    for (int n = 0; n < acc.max_terms; ++n) {
        const long double lt =
            (z == 0.0 && n > 0)
                ? -std::numeric_limits<long double>::infinity()
                : n * lz - static_cast<long double>(std::lgamma(alpha * n + beta));
        const long double mag = std::exp(lt);
        const long double term = (n % 2 == 1 && sign_z < 0) ? -mag : mag;
        if (mag > peak) peak = mag;

        const long double y = term - comp;
        const long double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        last_mag = mag;

        const long double scale =
            std::max(std::fabs(sum), static_cast<long double>(1e-300));
        if (mag <= acc.rel_tol * scale && mag <= prev_mag) {
            if (++below_count >= 3) {
                out.converged = true;
                break;
            }
        } else {
            below_count = 0;
        }
        prev_mag = mag;
    }
    if (!out.converged) return out;

    const long double eps = std::numeric_limits<long double>::epsilon();
    const long double est = eps * peak + last_mag;
    out.value = sum;
    out.rel_error = std::fabs(sum) > 0.0L
                        ? static_cast<double>(est / std::fabs(sum))
                        : (est > 0.0L ? std::numeric_limits<double>::infinity() : 0.0);
    return out;
}

// 1/Gamma(x) continued over the whole real line (entire function).
double recip_gamma(double x) {
    if (x > 0.0) return 1.0 / std::tgamma(x);
    // Reflection: 1/Gamma(x) = Gamma(1-x) sin(pi x)/pi, with the angle
    // reduced before scaling so large negative x keeps full precision.
    const double r = x - 2.0 * std::floor(x / 2.0); // x mod 2 in [0,2)
    const double s = std::sin(r * M_PI);
    return std::tgamma(1.0 - x) * s / M_PI;
}

// Algebraic expansion E_{alpha,beta}(z) ~ -sum_{k>=1} z^{-k}/Gamma(beta-alpha k)
// for z -> -infinity, 0 < alpha < 1, truncated at the smallest term.  The
// omitted exponentially small component is below the truncation term for the
// |z| where this is consulted.
MlEval ml_asymptotic_negative(double alpha, double beta, double z, int max_terms) {
    MlEval out;
    long double sum = 0.0L;
    long double prev_nonzero = std::numeric_limits<long double>::max();
    long double omitted = std::numeric_limits<long double>::max();
    int added = 0;
    const long double zi = 1.0L / static_cast<long double>(z);
    long double zpow = 1.0L;
    for (int k = 1; k <= max_terms; ++k) {
        zpow *= zi;
        const long double term =
            -zpow * static_cast<long double>(recip_gamma(beta - alpha * k));
        const long double mag = std::fabs(term);
        // Optimal truncation: stop at the first sign of growth against the
        // previous nonzero magnitude (exact zeros at the 1/Gamma poles are
        // skipped, they carry no envelope information).
        if (mag > 0.0L && mag >= prev_nonzero && k > 2) {
            omitted = mag;
            break;
        }
        sum += term;
        ++added;
        omitted = mag; // budget exit: last term stands in for the remainder
        if (mag > 0.0L) prev_nonzero = mag;
    }
    out.value = sum;
    out.converged = added >= 2 && std::fabs(sum) > 0.0L;
    if (out.converged) {
        // Terms are evaluated through double-precision gamma reflection, so
        // the certificate never claims better than ~1e-15 relative.
        const double trunc = static_cast<double>(omitted / std::fabs(sum));
        out.rel_error = std::max(trunc, 1e-15);
    }
    return out;
}

} // namespace

double mittag_leffler(double alpha, double beta, double z, SeriesAccuracy acc) {
    if (!(alpha > 0.0) || alpha > 2.0)
        throw DomainError("mittag_leffler: alpha must lie in (0,2]");
    if (!(beta > 0.0))
        throw DomainError("mittag_leffler: beta must be positive");
    if (std::fabs(z) > 100.0)
        throw DomainError("mittag_leffler: |z| above supported range 100");

    if (alpha == 1.0 && beta == 1.0) return std::exp(z);

    const MlEval series = ml_series(alpha, beta, z, acc);
    if (series.converged && series.rel_error <= acc.rel_tol)
        return static_cast<double>(series.value);

    // Deep on the negative axis the series cancels catastrophically while the
    // function itself decays algebraically; the asymptotic expansion takes
    // over when it certifies a tighter result than the series could.
    if (z < 0.0 && alpha < 1.0) {
        const MlEval asym = ml_asymptotic_negative(alpha, beta, z, acc.max_terms);
        if (asym.converged && asym.rel_error <= acc.rel_tol)
            return static_cast<double>(asym.value);
        if (asym.converged && series.converged)
            if (std::min(asym.rel_error, series.rel_error) <= 1e-9)
                return static_cast<double>(
                    asym.rel_error < series.rel_error ? asym.value : series.value);
    }

    if (!series.converged)
        throw AccuracyError(
            "mittag_leffler: series did not converge within term budget",
            std::numeric_limits<double>::quiet_NaN());
    std::ostringstream os;
    os << "mittag_leffler: cancellation leaves relative error " << series.rel_error
       << " above tolerance at alpha=" << alpha << " z=" << z;
    throw AccuracyError(os.str(), series.rel_error);
}

Matrix mittag_leffler_matrix(double alpha, double beta, const Matrix& A,
                             SeriesAccuracy acc) {
    if (!(alpha > 0.0) || alpha > 1.0)
        throw DomainError("mittag_leffler_matrix: alpha must lie in (0,1]");
    if (!(beta > 0.0))
        throw DomainError("mittag_leffler_matrix: beta must be positive");
    if (A.rows() != A.cols())
        throw DimensionError("mittag_leffler_matrix: matrix must be square");

    const auto n = A.rows();
    const double a_norm = A.norm();

    // T_0 = I/Gamma(beta); T_{k+1} = T_k A * Gamma(alpha k + beta)/Gamma(alpha(k+1)+beta).
    Matrix term = Matrix::Identity(n, n) / std::tgamma(beta);
    Matrix sum = term;
    double majorant = 1.0 / std::tgamma(beta); // scalar series on ||A||

    constexpr double tail_target = 1e-9;
    for (int k = 0; k < acc.max_terms; ++k) {
        const double ratio =
            std::exp(std::lgamma(alpha * k + beta) - std::lgamma(alpha * (k + 1) + beta));
        term = (term * A) * ratio;
        sum += term;
        majorant *= a_norm * ratio;

        // Once the majorant ratio drops below 1 the scalar tail is geometric.
        const double next_ratio =
            a_norm * std::exp(std::lgamma(alpha * (k + 1) + beta) -
                              std::lgamma(alpha * (k + 2) + beta));
        if (next_ratio < 0.5) {
            const double tail = majorant * next_ratio / (1.0 - next_ratio);
            if (tail <= tail_target) return sum;
        }
    }
    throw AccuracyError(
        "mittag_leffler_matrix: tail bound not met within term budget",
        std::numeric_limits<double>::quiet_NaN());
}

} // namespace frc
