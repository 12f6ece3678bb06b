#include "frc/relaxation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

namespace frc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double match_tol(const ConvexHull& hull) { return 1e-9 * (1.0 + hull.diameter()); }

} // namespace

// ---------------------------------------------------------------- relaxed

RelaxedControl RelaxedControl::uniform(const TimeGrid& grid, int channels,
                                       std::vector<Vector> atoms) {
    if (atoms.empty()) throw DomainError("RelaxedControl: no atoms");
    RelaxedControl rc;
    rc.grid = grid;
    rc.atoms = std::move(atoms);
    const Vector w = Vector::Constant(static_cast<int>(rc.atoms.size()),
                                      1.0 / static_cast<double>(rc.atoms.size()));
    rc.weights.assign(channels, std::vector<Vector>(grid.cells, w));
    return rc;
}

Vector RelaxedControl::barycenter(int chan, int cell) const {
    const Vector& w = weights.at(chan).at(cell);
    Vector out = Vector::Zero(atoms[0].size());
    for (int j = 0; j < n_atoms(); ++j) out += w(j) * atoms[j];
    return out;
}

ControlSignal RelaxedControl::barycenter_signal() const {
    ControlSignal u;
    u.grid = grid;
    u.channel.assign(n_channels(), std::vector<Vector>(grid.cells));
    for (int i = 0; i < n_channels(); ++i)
        for (int c = 0; c < grid.cells; ++c) u.channel[i][c] = barycenter(i, c);
    return u;
}

void RelaxedControl::check() const {
    if (atoms.empty()) throw DomainError("RelaxedControl: no atoms");
    if (weights.empty()) throw DimensionError("RelaxedControl: no channels");
    const int A = n_atoms();
    for (const auto& ch : weights) {
        if (static_cast<int>(ch.size()) != grid.cells)
            throw DimensionError("RelaxedControl: cell count does not match grid");
        for (const auto& w : ch) {
            if (w.size() != A)
                throw DimensionError("RelaxedControl: one weight per atom required");
            if (w.minCoeff() < -1e-12 || std::abs(w.sum() - 1.0) > 1e-9)
                throw DomainError("RelaxedControl: weights not in the simplex");
        }
    }
}

// --------------------------------------------------------------- epigraph

EpigraphAtoms restricted_cost(const CostSpec& g, const std::vector<Vector>& atoms,
                              double t, const Vector& x) {
    if (atoms.empty()) throw DomainError("restricted_cost: no atoms");
    EpigraphAtoms out;
    out.u = atoms;
    out.cost.reserve(atoms.size());
    const double state = g.state_part(t, x);
    for (const auto& a : atoms) out.cost.push_back(state + g.control_part(a));
    return out;
}

// --------------------------------------------------------------- envelope

EnvelopeFunction bipolar_envelope(const EpigraphAtoms& points) {
    if (points.size() == 0) throw DomainError("bipolar_envelope: no atoms");
    const int m = points.dim();
    if (m != 1 && m != 2)
        throw DomainError("bipolar_envelope: only scalar and planar controls");
    for (const auto& u : points.u)
        if (u.size() != m) throw DimensionError("bipolar_envelope: mixed atom dimensions");
    for (double c : points.cost)
        if (!std::isfinite(c)) throw DomainError("bipolar_envelope: non-finite cost");

    EnvelopeFunction env;
    env.points_ = points;
    env.hull_ = convex_hull(std::span<const Vector>(points.u.data(), points.u.size()));

    if (m == 1) {
        // Lower hull of (u_j, cost_j) by a monotone sweep.  Duplicate
        // abscissae keep the cheapest point (then the lowest index).
        std::vector<int> order(points.u.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int i, int j) {
            const double ui = points.u[i](0), uj = points.u[j](0);
            if (ui != uj) return ui < uj;
            if (points.cost[i] != points.cost[j]) return points.cost[i] < points.cost[j];
            return i < j;
        });
        std::vector<int> kept;
        for (int idx : order) {
            if (!kept.empty() && points.u[kept.back()](0) == points.u[idx](0)) continue;
            kept.push_back(idx);
        }
        std::vector<int>& bp = env.breakpoints_;
        for (int idx : kept) {
            while (bp.size() >= 2) {
                const double x1 = points.u[bp[bp.size() - 2]](0);
                const double y1 = points.cost[bp[bp.size() - 2]];
                const double x2 = points.u[bp.back()](0);
                const double y2 = points.cost[bp.back()];
                const double x3 = points.u[idx](0);
                const double y3 = points.cost[idx];
                // Pop the middle point while it lies strictly above the
                // chord; collinear points stay (they still support the hull).
                if ((y2 - y1) * (x3 - x2) <= (y3 - y2) * (x2 - x1)) break;
                bp.pop_back();
            }
            bp.push_back(idx);
        }
    }
    return env;
}

const ConvexHull& effective_set(const EnvelopeFunction& envelope) {
    return envelope.hull();
}

double EnvelopeFunction::operator()(double u) const {
    Vector v(1);
    v(0) = u;
    return (*this)(v);
}

double EnvelopeFunction::operator()(const Vector& u) const {
    if (u.size() != dim()) throw DimensionError("EnvelopeFunction: wrong control dimension");
    const double tol = match_tol(hull_);
    if (!hull_.contains(u, tol)) return kInf;

    if (dim() == 1) {
        const double x = std::clamp(u(0), hull_.lo, hull_.hi);
        if (breakpoints_.size() == 1) return points_.cost[breakpoints_[0]];
        // Left segment when x sits exactly on an interior breakpoint.
        size_t j = 1;
        while (j + 1 < breakpoints_.size() && points_.u[breakpoints_[j]](0) < x) ++j;
        const int p = breakpoints_[j - 1], q = breakpoints_[j];
        const double up = points_.u[p](0), uq = points_.u[q](0);
        const double w = (x - up) / (uq - up);
        return points_.cost[p] + w * (points_.cost[q] - points_.cost[p]);
    }

    // Planar case: exact minimization over supporting singles, pairs and
    // triples of atoms (Caratheodory: three suffice in the plane).
    double best = kInf;
    const int A = points_.size();
    for (int i = 0; i < A; ++i)
        if ((points_.u[i] - u).norm() <= tol) best = std::min(best, points_.cost[i]);
    for (int i = 0; i < A; ++i) {
        for (int j = i + 1; j < A; ++j) {
            const Vector d = points_.u[i] - points_.u[j];
            const double dd = d.squaredNorm();
            if (dd == 0.0) continue;
            const double lam = (u - points_.u[j]).dot(d) / dd;
            if (lam < -1e-12 || lam > 1.0 + 1e-12) continue;
            if ((lam * points_.u[i] + (1.0 - lam) * points_.u[j] - u).norm() > tol) continue;
            best = std::min(best, lam * points_.cost[i] + (1.0 - lam) * points_.cost[j]);
        }
    }
    for (int i = 0; i < A; ++i) {
        for (int j = i + 1; j < A; ++j) {
            for (int k = j + 1; k < A; ++k) {
                Eigen::Matrix3d S;
                S << points_.u[i](0), points_.u[j](0), points_.u[k](0),
                     points_.u[i](1), points_.u[j](1), points_.u[k](1),
                     1.0, 1.0, 1.0;
                Eigen::Vector3d rhs(u(0), u(1), 1.0);
                Eigen::FullPivLU<Eigen::Matrix3d> lu(S);
                if (!lu.isInvertible()) continue;
                const Eigen::Vector3d lam = lu.solve(rhs);
                if (lam.minCoeff() < -1e-12) continue;
                if ((S * lam - rhs).norm() > tol) continue;
                best = std::min(best, lam(0) * points_.cost[i] + lam(1) * points_.cost[j] +
                                          lam(2) * points_.cost[k]);
            }
        }
    }
    return best;
}

std::vector<EnvelopeFunction::Weight> EnvelopeFunction::decompose(const Vector& u) const {
    if (u.size() != dim()) throw DimensionError("EnvelopeFunction: wrong control dimension");
    const double tol = match_tol(hull_);
    if (!hull_.contains(u, tol))
        throw DomainError("EnvelopeFunction: point outside the control hull");

    std::vector<Weight> out;
    if (dim() == 1) {
        const double x = std::clamp(u(0), hull_.lo, hull_.hi);
        if (breakpoints_.size() == 1) return {{breakpoints_[0], 1.0}};
        size_t j = 1;
        while (j + 1 < breakpoints_.size() && points_.u[breakpoints_[j]](0) < x) ++j;
        const int p = breakpoints_[j - 1], q = breakpoints_[j];
        const double up = points_.u[p](0), uq = points_.u[q](0);
        const double w = (x - up) / (uq - up);
        if (1.0 - w > 0.0) out.push_back({p, 1.0 - w});
        if (w > 0.0) out.push_back({q, w});
        return out;
    }

    // Mirror operator(): scan singles, pairs, triples in index order and
    // keep the first combination achieving the minimum.
    double best = kInf;
    const int A = points_.size();
    for (int i = 0; i < A; ++i) {
        if ((points_.u[i] - u).norm() <= tol && points_.cost[i] < best) {
            best = points_.cost[i];
            out = {{i, 1.0}};
        }
    }
    for (int i = 0; i < A; ++i) {
        for (int j = i + 1; j < A; ++j) {
            const Vector d = points_.u[i] - points_.u[j];
            const double dd = d.squaredNorm();
            if (dd == 0.0) continue;
            const double lam = (u - points_.u[j]).dot(d) / dd;
            if (lam < -1e-12 || lam > 1.0 + 1e-12) continue;
            if ((lam * points_.u[i] + (1.0 - lam) * points_.u[j] - u).norm() > tol) continue;
            const double val = lam * points_.cost[i] + (1.0 - lam) * points_.cost[j];
            if (val < best) {
                best = val;
                out.clear();
                const double li = std::clamp(lam, 0.0, 1.0);
                if (li > 0.0) out.push_back({i, li});
                if (1.0 - li > 0.0) out.push_back({j, 1.0 - li});
            }
        }
    }
    for (int i = 0; i < A; ++i) {
        for (int j = i + 1; j < A; ++j) {
            for (int k = j + 1; k < A; ++k) {
                Eigen::Matrix3d S;
                S << points_.u[i](0), points_.u[j](0), points_.u[k](0),
                     points_.u[i](1), points_.u[j](1), points_.u[k](1),
                     1.0, 1.0, 1.0;
                Eigen::Vector3d rhs(u(0), u(1), 1.0);
                Eigen::FullPivLU<Eigen::Matrix3d> lu(S);
                if (!lu.isInvertible()) continue;
                Eigen::Vector3d lam = lu.solve(rhs);
                if (lam.minCoeff() < -1e-12) continue;
                if ((S * lam - rhs).norm() > tol) continue;
                const double val =
                    lam(0) * points_.cost[i] + lam(1) * points_.cost[j] + lam(2) * points_.cost[k];
                if (val < best) {
                    best = val;
                    lam = lam.cwiseMax(0.0);
                    lam /= lam.sum();
                    out.clear();
                    const int idx[3] = {i, j, k};
                    for (int s = 0; s < 3; ++s)
                        if (lam(s) > 0.0) out.push_back({idx[s], lam(s)});
                }
            }
        }
    }
    if (out.empty())
        throw DomainError("EnvelopeFunction: no supporting combination found");
    return out;
}

std::vector<EnvelopeFunction::Weight>
caratheodory_decompose(const EnvelopeFunction& envelope, const Vector& u_star) {
    return envelope.decompose(u_star);
}

// ------------------------------------------------------------- chattering

ControlSignal chattering_sequence(const RelaxedControl& relaxed, int n_blocks,
                                  int cells_per_block) {
    relaxed.check();
    if (n_blocks < 1) throw DomainError("chattering_sequence: need at least one block");
    if (cells_per_block < 1) throw DomainError("chattering_sequence: need at least one cell per block");

    const int A = relaxed.n_atoms();
    const int r = relaxed.n_channels();
    const int Q = cells_per_block;
    const double a = relaxed.grid.horizon;

    ControlSignal out;
    out.grid = TimeGrid::uniform(a, n_blocks * Q);
    out.channel.assign(r, std::vector<Vector>(out.grid.cells));

    std::vector<double> wbar(A);
    std::vector<int> count(A), order(A);
    for (int i = 0; i < r; ++i) {
        for (int b = 0; b < n_blocks; ++b) {
            const double t0 = a * b / n_blocks;
            const double t1 = a * (b + 1) / n_blocks;
            std::fill(wbar.begin(), wbar.end(), 0.0);
            for (int c = 0; c < relaxed.grid.cells; ++c) {
                const double lo = std::max(t0, relaxed.grid.node(c));
                const double hi = std::min(t1, relaxed.grid.node(c + 1));
                if (hi <= lo) continue;
                const Vector& w = relaxed.weights[i][c];
                for (int j = 0; j < A; ++j) wbar[j] += (hi - lo) * w(j);
            }
            for (int j = 0; j < A; ++j) wbar[j] /= (t1 - t0);

            // Largest-remainder split of the Q cells among the atoms.
            int used = 0;
            for (int j = 0; j < A; ++j) {
                count[j] = static_cast<int>(std::floor(wbar[j] * Q));
                used += count[j];
            }
            int leftover = Q - used;
            std::iota(order.begin(), order.end(), 0);
            std::sort(order.begin(), order.end(), [&](int x, int y) {
                const double rx = wbar[x] * Q - std::floor(wbar[x] * Q);
                const double ry = wbar[y] * Q - std::floor(wbar[y] * Q);
                if (rx != ry) return rx > ry;
                return x < y;
            });
            for (int s = 0; s < A && leftover > 0; ++s, --leftover) ++count[order[s]];

            int cell = b * Q;
            const int block_end = (b + 1) * Q;
            for (int j = 0; j < A; ++j)
                for (int c = 0; c < count[j] && cell < block_end; ++c)
                    out.channel[i][cell++] = relaxed.atoms[j];
            // Rounding dust can only under-fill; pad with the last atom used.
            for (; cell < block_end; ++cell) out.channel[i][cell] = out.channel[i][cell - 1];
        }
    }
    return out;
}

} // namespace frc
