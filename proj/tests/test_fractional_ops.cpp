#include "doctest.h"

#include <cmath>

#include "frc/fractional_ops.hpp"
#include "frc/special_functions.hpp"
#include "support/oracles.hpp"

using namespace frc;

namespace {

GridFunction sampled(const TimeGrid& g, double (*f)(double)) {
    GridFunction out = GridFunction::zero(g, 1);
    for (int k = 0; k <= g.cells; ++k) out.values[k](0) = f(g.node(k));
    return out;
}

double max_err(const GridFunction& got, double (*truth)(double)) {
    double worst = 0.0;
    for (int k = 0; k <= got.grid.cells; ++k)
        worst = std::max(worst, std::abs(got.values[k](0) - truth(got.grid.node(k))));
    return worst;
}

} // namespace

TEST_CASE("fractional integral: zero, classical limit, constant closed form") {
    const TimeGrid g = TimeGrid::uniform(1.0, 64);

    const GridFunction zero = rl_integral(GridFunction::zero(g, 2), 0.5);
    for (const auto& v : zero.values) CHECK(v.norm() == 0.0);

    const GridFunction ones = sampled(g, [](double) { return 1.0; });
    const GridFunction classical = rl_integral(ones, 1.0);
    for (int k = 0; k <= g.cells; ++k)
        CHECK(classical.values[k](0) == doctest::Approx(g.node(k)).epsilon(1e-14));

    const GridFunction half = rl_integral(ones, 0.5);
    const double g15 = gamma_fn(1.5);
    for (int k = 0; k <= g.cells; ++k)
        CHECK(half.values[k](0) ==
              doctest::Approx(std::sqrt(g.node(k)) / g15).epsilon(1e-10));
}

TEST_CASE("fractional integral is linear") {
    const TimeGrid g = TimeGrid::uniform(2.0, 40);
    const GridFunction f1 = sampled(g, [](double t) { return std::sin(3.0 * t); });
    const GridFunction f2 = sampled(g, [](double t) { return t * t - 0.5; });

    GridFunction combo = GridFunction::zero(g, 1);
    for (int k = 0; k <= g.cells; ++k)
        combo.values[k] = 2.5 * f1.values[k] - 1.25 * f2.values[k];

    const GridFunction lhs = rl_integral(combo, 0.7);
    const GridFunction r1 = rl_integral(f1, 0.7);
    const GridFunction r2 = rl_integral(f2, 0.7);
    for (int k = 0; k <= g.cells; ++k)
        CHECK(lhs.values[k](0) ==
              doctest::Approx(2.5 * r1.values[k](0) - 1.25 * r2.values[k](0)).epsilon(1e-12));
}

TEST_CASE("fractional integral semigroup property under refinement") {
    auto defect = [](int N) {
        const TimeGrid g = TimeGrid::uniform(1.0, N);
        GridFunction f = GridFunction::zero(g, 1);
        for (int k = 0; k <= N; ++k) {
            const double t = g.node(k);
            f.values[k](0) = 1.0 + t + 0.5 * std::cos(2.0 * t);
        }
        const GridFunction two_step = rl_integral(rl_integral(f, 0.4), 0.3);
        const GridFunction one_step = rl_integral(f, 0.7);
        double worst = 0.0;
        for (int k = 0; k <= N; ++k)
            worst = std::max(worst, std::abs(two_step.values[k](0) - one_step.values[k](0)));
        return worst;
    };
    const double coarse = defect(50);
    const double fine = defect(200);
    CHECK(fine < coarse);
    CHECK(fine < 2e-3);
}

TEST_CASE("Caputo derivative of a constant is exactly zero") {
    const TimeGrid g = TimeGrid::uniform(1.0, 128);
    GridFunction c = GridFunction::zero(g, 2);
    for (auto& v : c.values) {
        v(0) = 3.75;
        v(1) = -11.0;
    }
    const GridFunction d = caputo_derivative(c, 0.4);
    for (const auto& v : d.values) CHECK(v.norm() == 0.0);
}

TEST_CASE("Caputo derivative of t at order one half") {
    const TimeGrid g = TimeGrid::uniform(1.0, 200);
    const GridFunction lin = sampled(g, [](double t) { return t; });
    const GridFunction d = caputo_derivative(lin, 0.5);
    // Gamma(3/2) = sqrt(pi)/2
    const double err =
        max_err(d, [](double t) { return std::sqrt(t) / 0.8862269254527580; });
    // The sampled slope of t is exactly 1, so the scheme reproduces the
    // closed form to roundoff.
    CHECK(err < 1e-12);
}

TEST_CASE("Caputo error at least halves when the grid doubles") {
    auto interior_err = [](int N) {
        const TimeGrid g = TimeGrid::uniform(1.0, N);
        const GridFunction sq = sampled(g, [](double t) { return t * t; });
        const GridFunction d = caputo_derivative(sq, 0.6);
        const double c = 2.0 / gamma_fn(2.4);
        double worst = 0.0;
        for (int k = 0; k <= N; ++k) {
            const double t = g.node(k);
            worst = std::max(worst, std::abs(d.values[k](0) - c * std::pow(t, 1.4)));
        }
        return worst;
    };
    const double e100 = interior_err(100);
    const double e200 = interior_err(200);
    const double e400 = interior_err(400);
    CHECK(e100 / e200 >= 2.0);
    CHECK(e200 / e400 >= 2.0);
}

TEST_CASE("Caputo needs at least two cells") {
    const TimeGrid g = TimeGrid::uniform(1.0, 1);
    CHECK_THROWS_AS(caputo_derivative(GridFunction::zero(g, 1), 0.5), DomainError);
}

TEST_CASE("derivative inverts the integral for functions vanishing at zero") {
    auto defect = [](int N) {
        const TimeGrid g = TimeGrid::uniform(1.0, N);
        GridFunction f = GridFunction::zero(g, 1);
        for (int k = 0; k <= N; ++k) {
            const double t = g.node(k);
            f.values[k](0) = t * (1.0 - 0.5 * t);
        }
        const GridFunction back = caputo_derivative(rl_integral(f, 0.5), 0.5);
        double worst = 0.0;
        for (int k = 0; k <= N; ++k)
            worst = std::max(worst, std::abs(back.values[k](0) - f.values[k](0)));
        return worst;
    };
    const double coarse = defect(100);
    const double fine = defect(200);
    CHECK(fine < coarse);
    CHECK(fine < 1e-2);
}

TEST_CASE("Gronwall majorant: degenerate and classical limits") {
    const TimeGrid g = TimeGrid::uniform(1.0, 32);
    GridFunction psi = GridFunction::zero(g, 1);
    for (auto& v : psi.values) v(0) = 2.0;

    const GridFunction tiny = gronwall_bound(psi, 1e-14, 0.5);
    for (int k = 0; k <= g.cells; ++k)
        CHECK(tiny.values[k](0) == doctest::Approx(2.0).epsilon(1e-10));

    const GridFunction classical = gronwall_bound(psi, 0.7, 0.0);
    for (int k = 0; k <= g.cells; ++k)
        CHECK(classical.values[k](0) ==
              doctest::Approx(2.0 * std::exp(0.7 * g.node(k))).epsilon(1e-10));
}

TEST_CASE("Gronwall majorant dominates the Volterra solution") {
    const double lambda = 0.3, gamma = 0.5, a = 1.0;
    const int N = 200;
    const std::vector<double> x = oracles::volterra_picard(lambda, gamma, a, N);

    const TimeGrid g = TimeGrid::uniform(a, N);
    GridFunction psi = GridFunction::zero(g, 1);
    for (auto& v : psi.values) v(0) = 1.0;
    const GridFunction bound = gronwall_bound(psi, lambda, gamma);
    for (int k = 0; k <= N; ++k) CHECK(bound.values[k](0) >= x[k] - 1e-9);
}

TEST_CASE("Gronwall majorant is monotone in lambda and psi, rejects decreasing psi") {
    const TimeGrid g = TimeGrid::uniform(1.0, 16);
    GridFunction psi = GridFunction::zero(g, 1);
    GridFunction psi_bigger = GridFunction::zero(g, 1);
    for (int k = 0; k <= g.cells; ++k) {
        psi.values[k](0) = 1.0 + g.node(k);
        psi_bigger.values[k](0) = 1.5 + g.node(k);
    }
    const GridFunction b1 = gronwall_bound(psi, 0.4, 0.3);
    const GridFunction b2 = gronwall_bound(psi, 0.9, 0.3);
    const GridFunction b3 = gronwall_bound(psi_bigger, 0.4, 0.3);
    for (int k = 0; k <= g.cells; ++k) {
        CHECK(b2.values[k](0) >= b1.values[k](0));
        CHECK(b3.values[k](0) >= b1.values[k](0));
    }

    GridFunction down = GridFunction::zero(g, 1);
    for (int k = 0; k <= g.cells; ++k) down.values[k](0) = 1.0 - 0.1 * g.node(k);
    CHECK_THROWS_AS(gronwall_bound(down, 0.4, 0.3), DomainError);
}
