#pragma once

#include <Eigen/Dense>
#include <vector>

#include "frc/errors.hpp"

namespace frc {

// Uniform partition of [0, horizon] into `cells` intervals.  Node k sits at
// k*dt; cell k is [node k, node k+1).
struct TimeGrid {
    double horizon = 1.0;
    int cells = 1;

    static TimeGrid uniform(double horizon, int cells) {
        if (!(horizon > 0.0))
            throw DomainError("TimeGrid: horizon must be positive");
        if (cells < 1)
            throw DomainError("TimeGrid: need at least one cell");
        return TimeGrid{horizon, cells};
    }

    double dt() const { return horizon / cells; }
    int nodes() const { return cells + 1; }
    double node(int k) const { return horizon * k / cells; }
    double midpoint(int cell) const { return horizon * (cell + 0.5) / cells; }

    bool operator==(const TimeGrid& o) const {
        return horizon == o.horizon && cells == o.cells;
    }

    // Cell containing t, with the right endpoint folded into the last cell.
    int cell_of(double t) const {
        if (t < 0.0 || t > horizon * (1.0 + 1e-12))
            throw DomainError("TimeGrid: time outside [0, horizon]");
        int c = static_cast<int>(t / dt());
        if (c >= cells) c = cells - 1;
        return c;
    }
};

// Vector-valued samples at the nodes of a grid.
struct GridFunction {
    TimeGrid grid;
    std::vector<Eigen::VectorXd> values; // size grid.nodes()

    static GridFunction zero(const TimeGrid& g, int dim) {
        GridFunction f;
        f.grid = g;
        f.values.assign(g.nodes(), Eigen::VectorXd::Zero(dim));
        return f;
    }

    int dim() const { return values.empty() ? 0 : static_cast<int>(values[0].size()); }

    void check() const {
        if (static_cast<int>(values.size()) != grid.nodes())
            throw DimensionError("GridFunction: sample count does not match grid");
        for (const auto& v : values)
            if (!v.allFinite())
                throw DomainError("GridFunction: non-finite sample");
    }

    // Piecewise-linear evaluation between nodes.
    Eigen::VectorXd at(double t) const {
        const int c = grid.cell_of(t);
        const double tl = grid.node(c);
        const double w = (t - tl) / grid.dt();
        return (1.0 - w) * values[c] + w * values[c + 1];
    }

    double sup_norm() const {
        double m = 0.0;
        for (const auto& v : values) m = std::max(m, v.norm());
        return m;
    }
};

} // namespace frc
