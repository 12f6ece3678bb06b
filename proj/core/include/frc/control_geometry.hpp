#pragma once

#include <optional>
#include <span>

#include "frc/grid.hpp"

namespace frc {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/* Finite control constraint set.  The base atoms live in R^m (m <= 2).
 * Optionally the set moves with the state through a bounded-translation
 * rule applied after the radial retraction onto the a-priori ball:
 *
 *   U(t, x) = { u_j + W * retract(x, L0) },
 *
 * which is Lipschitz in x with constant ||W|| (the retraction is
 * nonexpansive in the Euclidean norm).  Growth data: ||U(t,x)|| <=
 * a3 + c3 ||x|| with a3 = max_j ||u_j||, c3 = ||W||.
 */
struct FiniteControlSet {
    enum class StateRule { fixed, translate };

    std::vector<VectorXd> atoms;
    StateRule rule = StateRule::fixed;
    MatrixXd W; // m x n, used by StateRule::translate

    int dim() const { return atoms.empty() ? 0 : static_cast<int>(atoms[0].size()); }

    void check() const;

    std::vector<VectorXd> atoms_at(const VectorXd& x, double L0) const;

    double lipschitz_k3() const;   // k3
    double growth_a3() const;      // a3
    double growth_c3() const;      // c3
};

// Hausdorff distance between finite sets in R^m.
double hausdorff(std::span<const VectorXd> A, std::span<const VectorXd> B);

// Radial retraction onto the closed ball of radius L0.
VectorXd radial_retraction(const VectorXd& x, double L0);

/* Convex hull of finitely many points, dimension 1 or 2.
 * For m == 1 the hull is the interval [lo, hi]; for m == 2 the vertices are
 * stored counterclockwise.  Degenerate (collinear) planar inputs collapse to
 * a segment.
 */
struct ConvexHull {
    int dim = 1;
    double lo = 0.0, hi = 0.0;       // m == 1
    std::vector<VectorXd> vertices;  // m == 2, CCW; size 1 or 2 if degenerate

    bool contains(const VectorXd& u, double tol = 1e-9) const;
    double diameter() const;
    VectorXd centroid() const;
};

ConvexHull convex_hull(std::span<const VectorXd> points);

/* Seminorm used for control convergence:
 *
 *   |u|_w = sup_{0 <= t1 <= t2 <= a} | integral_{t1}^{t2} u(s) ds |
 *
 * For piecewise-constant u the supremum is attained at cell boundaries, so
 * the exact value is the maximal norm of a difference of cumulative sums.
 * q = 1/beta > 1 identifies the ambient L^q space; the value itself does
 * not depend on it.
 */
double weak_norm(const TimeGrid& grid, std::span<const VectorXd> cell_values,
                 double q = 2.0);

} // namespace frc
