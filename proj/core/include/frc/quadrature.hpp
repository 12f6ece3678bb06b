#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "frc/errors.hpp"

namespace frc {

/* Adaptive Gauss-Kronrod (G7,K15) panels with bisection.  The integrand may
 * return double or any Eigen-like type supporting +, *, and a norm; the
 * scalar and matrix instantiations below share the node table.
 *
 * Nodes/weights are the standard 15-point Kronrod extension of 7-point
 * Gauss-Legendre on [-1,1], accurate to the digits given.
 */
namespace gk {

inline constexpr double node[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

inline constexpr double wk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

inline constexpr double wg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

} // namespace gk

struct QuadOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int max_panels = 2000;
};

namespace detail {

template <class T> double quad_norm(const T& v) { return v.norm(); }
inline double quad_norm(double v) { return std::fabs(v); }

// One (G7,K15) panel on [a,b].  Returns the K15 value; err is |K15-G7|.
// The integrand must return a plain value type (double or a materialized
// Eigen matrix), not an expression.
template <class F>
auto gk_panel(F&& f, double a, double b, double& err)
    -> decltype(f(0.0)) {
    using Value = decltype(f(0.0));
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);

    Value fc = f(c);
    Value kron = fc * gk::wk[7];
    Value gauss = fc * gk::wg[3];
    for (int i = 0; i < 7; ++i) {
        const double dx = h * gk::node[i];
        Value fsum = f(c - dx) + f(c + dx);
        kron = kron + fsum * gk::wk[i];
        if (i % 2 == 1) gauss = gauss + fsum * gk::wg[i / 2];
    }
    kron = kron * h;
    gauss = gauss * h;
    err = quad_norm(kron - gauss);
    return kron;
}

} // namespace detail

// Adaptive bisection driven by per-panel K15-vs-G7 estimates.  Panels are
// split worst-first until the summed estimate meets abs_tol + rel_tol*|I|.
template <class F>
auto integrate_adaptive(F&& f, double a, double b, QuadOptions opt = {})
    -> decltype(f(0.0)) {
    struct Panel {
        double a, b, err;
        decltype(f(0.0)) val;
    };
    std::vector<Panel> panels;
    panels.reserve(64);

    double err0 = 0.0;
    auto v0 = detail::gk_panel(f, a, b, err0);
    panels.push_back({a, b, err0, v0});

    for (;;) {
        double total_err = 0.0;
        double total_norm = 0.0;
        int worst = 0;
        for (int i = 0; i < static_cast<int>(panels.size()); ++i) {
            total_err += panels[i].err;
            total_norm += detail::quad_norm(panels[i].val);
            if (panels[i].err > panels[worst].err) worst = i;
        }
        if (total_err <= opt.abs_tol + opt.rel_tol * total_norm) break;
        if (static_cast<int>(panels.size()) >= opt.max_panels)
            throw AccuracyError("adaptive quadrature: panel budget exhausted",
                                total_err);

        Panel p = panels[worst];
        const double mid = 0.5 * (p.a + p.b);
        double el = 0.0, er = 0.0;
        auto vl = detail::gk_panel(f, p.a, mid, el);
        auto vr = detail::gk_panel(f, mid, p.b, er);
        panels[worst] = {p.a, mid, el, vl};
        panels.push_back({mid, p.b, er, vr});
    }

    auto sum = panels[0].val;
    for (std::size_t i = 1; i < panels.size(); ++i) sum = sum + panels[i].val;
    return sum;
}

} // namespace frc
