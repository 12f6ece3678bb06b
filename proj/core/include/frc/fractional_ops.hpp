#pragma once

#include "frc/grid.hpp"

namespace frc {

/* Discrete fractional calculus on uniform grids.
 *
 * rl_integral: Riemann-Liouville integral of order alpha in (0,1],
 *   (I^a f)(t) = 1/Gamma(a) * integral_0^t (t-s)^{a-1} f(s) ds,
 * by product integration: f is interpolated piecewise-linearly and the
 * kernel is integrated exactly on every cell, so linear integrands are
 * reproduced to roundoff.
 *
 * caputo_derivative: Caputo derivative of order alpha in (0,1) by the L1
 * scheme, i.e. the exact I^{1-a} of the piecewise-constant slope of the
 * samples.  Nodes at t=0 carry the value 0.
 *
 * gronwall_bound: the singular-kernel Gronwall majorant.  For data
 * x(t) <= psi(t) + lambda * integral_0^t (t-s)^{-gamma} x(s) ds with
 * nondecreasing psi, the bound is psi(t) * E_{1-gamma}(lambda *
 * Gamma(1-gamma) * t^{1-gamma}), evaluated per node.
 */

GridFunction rl_integral(const GridFunction& f, double alpha);

GridFunction caputo_derivative(const GridFunction& x, double alpha);

GridFunction gronwall_bound(const GridFunction& psi, double lambda, double gamma);

} // namespace frc
