#include "frc/control_geometry.hpp"

#include <algorithm>
#include <cmath>

namespace frc {

void FiniteControlSet::check() const {
    if (atoms.empty())
        throw DomainError("FiniteControlSet: atom list must be nonempty");
    const int m = dim();
    if (m < 1 || m > 2)
        throw DomainError("FiniteControlSet: control dimension must be 1 or 2");
    for (const auto& u : atoms) {
        if (static_cast<int>(u.size()) != m)
            throw DimensionError("FiniteControlSet: atoms of mixed dimension");
        if (!u.allFinite())
            throw DomainError("FiniteControlSet: non-finite atom");
    }
    for (std::size_t i = 0; i < atoms.size(); ++i)
        for (std::size_t j = i + 1; j < atoms.size(); ++j)
            if ((atoms[i] - atoms[j]).norm() == 0.0)
                throw DomainError("FiniteControlSet: atoms must be distinct");
    if (rule == StateRule::translate && W.rows() != m)
        throw DimensionError("FiniteControlSet: W row count must equal control dim");
}

std::vector<VectorXd> FiniteControlSet::atoms_at(const VectorXd& x, double L0) const {
    if (rule == StateRule::fixed) return atoms;
    const VectorXd shift = W * radial_retraction(x, L0);
    std::vector<VectorXd> out;
    out.reserve(atoms.size());
    for (const auto& u : atoms) out.push_back(u + shift);
    return out;
}

double FiniteControlSet::lipschitz_k3() const {
    if (rule == StateRule::fixed) return 0.0;
    return W.operatorNorm();
}

double FiniteControlSet::growth_a3() const {
    double m = 0.0;
    for (const auto& u : atoms) m = std::max(m, u.norm());
    return m;
}

double FiniteControlSet::growth_c3() const { return lipschitz_k3(); }

double hausdorff(std::span<const VectorXd> A, std::span<const VectorXd> B) {
    if (A.empty() || B.empty())
        throw DomainError("hausdorff: sets must be nonempty");
    auto one_sided = [](std::span<const VectorXd> P, std::span<const VectorXd> Q) {
        double worst = 0.0;
        for (const auto& p : P) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& q : Q) best = std::min(best, (p - q).norm());
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(one_sided(A, B), one_sided(B, A));
}

VectorXd radial_retraction(const VectorXd& x, double L0) {
    if (!(L0 > 0.0))
        throw DomainError("radial_retraction: radius must be positive");
    const double n = x.norm();
    if (n <= L0) return x;
    return (L0 / n) * x;
}

namespace {

double cross2(const VectorXd& o, const VectorXd& a, const VectorXd& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

} // namespace

ConvexHull convex_hull(std::span<const VectorXd> points) {
    if (points.empty())
        throw DomainError("convex_hull: need at least one point");
    const int m = static_cast<int>(points[0].size());

    ConvexHull hull;
    hull.dim = m;
    if (m == 1) {
        hull.lo = points[0][0];
        hull.hi = points[0][0];
        for (const auto& p : points) {
            hull.lo = std::min(hull.lo, p[0]);
            hull.hi = std::max(hull.hi, p[0]);
        }
        return hull;
    }
    if (m != 2)
        throw DomainError("convex_hull: supported dimensions are 1 and 2");

    // Andrew's monotone chain; ties broken lexicographically, interior
    // collinear points dropped.
    std::vector<VectorXd> pts(points.begin(), points.end());
    std::sort(pts.begin(), pts.end(), [](const VectorXd& a, const VectorXd& b) {
        return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const VectorXd& a, const VectorXd& b) {
                              return a[0] == b[0] && a[1] == b[1];
                          }),
              pts.end());

    if (pts.size() <= 2) {
        hull.vertices = pts;
        return hull;
    }

    std::vector<VectorXd> chain(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross2(chain[k - 2], chain[k - 1], p) <= 0.0) --k;
        chain[k++] = p;
    }
    const std::size_t lower = k + 1;
    for (auto it = pts.rbegin() + 1; it != pts.rend(); ++it) {
        while (k >= lower && cross2(chain[k - 2], chain[k - 1], *it) <= 0.0) --k;
        chain[k++] = *it;
    }
    chain.resize(k - 1);
    if (chain.size() < 2) { // fully collinear input
        hull.vertices.assign(pts.begin(), pts.end());
        if (hull.vertices.size() > 2)
            hull.vertices = {pts.front(), pts.back()};
        return hull;
    }
    hull.vertices = std::move(chain);
    return hull;
}

bool ConvexHull::contains(const VectorXd& u, double tol) const {
    if (dim == 1) return u[0] >= lo - tol && u[0] <= hi + tol;
    if (vertices.size() == 1) return (u - vertices[0]).norm() <= tol;
    if (vertices.size() == 2) {
        // distance to the segment
        const VectorXd& a = vertices[0];
        const VectorXd& b = vertices[1];
        const VectorXd d = b - a;
        const double len2 = d.squaredNorm();
        double s = len2 > 0.0 ? (u - a).dot(d) / len2 : 0.0;
        s = std::clamp(s, 0.0, 1.0);
        return (u - (a + s * d)).norm() <= tol;
    }
    const std::size_t n = vertices.size();
    for (std::size_t i = 0; i < n; ++i) {
        const VectorXd& a = vertices[i];
        const VectorXd& b = vertices[(i + 1) % n];
        const double edge = (b - a).norm();
        if (cross2(a, b, u) < -tol * std::max(edge, 1.0)) return false;
    }
    return true;
}

double ConvexHull::diameter() const {
    if (dim == 1) return hi - lo;
    double d = 0.0;
    for (std::size_t i = 0; i < vertices.size(); ++i)
        for (std::size_t j = i + 1; j < vertices.size(); ++j)
            d = std::max(d, (vertices[i] - vertices[j]).norm());
    return d;
}

VectorXd ConvexHull::centroid() const {
    if (dim == 1) {
        VectorXd c(1);
        c[0] = 0.5 * (lo + hi);
        return c;
    }
    VectorXd c = VectorXd::Zero(2);
    for (const auto& v : vertices) c += v;
    return c / static_cast<double>(vertices.size());
}

double weak_norm(const TimeGrid& grid, std::span<const VectorXd> cell_values,
                 double q) {
    if (!(q > 1.0))
        throw DomainError("weak_norm: exponent q must exceed 1");
    if (static_cast<int>(cell_values.size()) != grid.cells)
        throw DimensionError("weak_norm: need one value per grid cell");
    if (grid.cells == 0) return 0.0;

    const int m = static_cast<int>(cell_values[0].size());
    const double h = grid.dt();

    if (m == 1) {
        // max over boundary pairs of |P_j - P_i| = max P - min P
        double P = 0.0, lo = 0.0, hi = 0.0;
        for (const auto& v : cell_values) {
            P += h * v[0];
            lo = std::min(lo, P);
            hi = std::max(hi, P);
        }
        return hi - lo;
    }

    std::vector<VectorXd> cum(grid.cells + 1, VectorXd::Zero(m));
    for (int k = 0; k < grid.cells; ++k) cum[k + 1] = cum[k] + h * cell_values[k];
    double best = 0.0;
    for (int i = 0; i <= grid.cells; ++i)
        for (int j = i + 1; j <= grid.cells; ++j)
            best = std::max(best, (cum[j] - cum[i]).norm());
    return best;
}

} // namespace frc
