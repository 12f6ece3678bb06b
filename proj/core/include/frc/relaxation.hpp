#pragma once

#include <vector>

#include "frc/control_geometry.hpp"
#include "frc/mild_solver.hpp"

namespace frc {

/* Convexification toolkit: the lower convex envelope of a cost restricted
 * to the constraint atoms (its biconjugate over the hull), Caratheodory
 * decompositions of hull points into epigraph atoms, and block-proportional
 * chattering signals that realize hull-valued controls as fast-switching
 * atom-valued ones.
 */

/* Hull-valued control given by simplex weights over the constraint atoms,
 * one weight vector per channel and cell.  The represented value is the
 * barycenter sum_j w_j atom_j.
 */
struct RelaxedControl {
    TimeGrid grid;
    std::vector<Vector> atoms;
    std::vector<std::vector<Vector>> weights; // [channel][cell], length #atoms each

    static RelaxedControl uniform(const TimeGrid& grid, int channels,
                                  std::vector<Vector> atoms);

    int n_channels() const { return static_cast<int>(weights.size()); }
    int n_atoms() const { return static_cast<int>(atoms.size()); }
    Vector barycenter(int chan, int cell) const;
    ControlSignal barycenter_signal() const;
    void check() const; // simplex membership per (channel, cell)
};

// Finite graph of a cost over the atoms at one (t, x): the points
// (u_j, g(t, x, u_j)) whose lower convex boundary is the envelope.
struct EpigraphAtoms {
    std::vector<Vector> u;
    std::vector<double> cost;

    int size() const { return static_cast<int>(u.size()); }
    int dim() const { return u.empty() ? 0 : static_cast<int>(u[0].size()); }
};

EpigraphAtoms restricted_cost(const CostSpec& g, const std::vector<Vector>& atoms,
                              double t, const Vector& x);

/* Lower convex envelope of a finite epigraph point set, i.e. the pointwise
 * min of sum_j lambda_j cost_j over simplex weights whose barycenter is u.
 * Scalar controls keep the sorted lower-hull breakpoints (with their atom
 * indices); planar controls evaluate by exact enumeration of supporting
 * singles, pairs and triples.  Evaluation outside the atom hull is +inf.
 */
class EnvelopeFunction {
public:
    struct Weight {
        int atom = 0;
        double lambda = 0.0;
    };

    int dim() const { return points_.dim(); }
    const EpigraphAtoms& points() const { return points_; }
    const ConvexHull& hull() const { return hull_; }
    // Scalar case: atom indices of the lower-hull vertices, by increasing u.
    const std::vector<int>& breakpoints() const { return breakpoints_; }

    double operator()(const Vector& u) const;
    double operator()(double u) const; // scalar convenience

    // Convex combination of epigraph atoms realizing (u, value(u)): at most
    // two atoms for scalar controls, three for planar ones.  When u sits on
    // a breakpoint shared by two segments the left segment is used.  Throws
    // DomainError outside the hull.
    std::vector<Weight> decompose(const Vector& u) const;

private:
    friend EnvelopeFunction bipolar_envelope(const EpigraphAtoms& points);
    EpigraphAtoms points_;
    ConvexHull hull_;
    std::vector<int> breakpoints_;
};

EnvelopeFunction bipolar_envelope(const EpigraphAtoms& points);

// The envelope's effective domain: the convex hull of the atoms.
const ConvexHull& effective_set(const EnvelopeFunction& envelope);

std::vector<EnvelopeFunction::Weight>
caratheodory_decompose(const EnvelopeFunction& envelope, const Vector& u_star);

/* Atom-valued switching signal whose block averages match the relaxed
 * control: [0, horizon] is cut into n_blocks blocks of cells_per_block
 * cells; within each block the cells are dealt to the atoms (in atom-list
 * order) proportionally to the block-averaged weights, by largest-remainder
 * rounding (ties to the lower atom index).  The weak distance to the
 * barycenter signal is O(hull diameter * horizon / n_blocks).
 */
ControlSignal chattering_sequence(const RelaxedControl& relaxed, int n_blocks,
                                  int cells_per_block = 16);

} // namespace frc
