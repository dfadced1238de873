#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "odes.hpp"
#include "types.hpp"

namespace sphfun {

// Square-integrable state at an eigenvalue, represented by its two decaying
// branches: the right branch integrated inward from +L, the left branch from
// -L.  Each branch is used only on its own half-axis, where inward
// integration amplifies the wanted solution, so no growing-mode
// contamination occurs.  kappa rescales the left branch so the dominant
// component of (X, Q) is continuous at xi = 0; the relative mismatch of the
// other component measures how far lambda is from a true eigenvalue.
struct AxisState {
    AxisEquation eq;
    double L = 0.0;
    double kappa = 1.0;  // left-branch multiplier
    double amp = 1.0;    // global normalization multiplier
    double glue_mismatch = 0.0;
    double tol = 1e-12;

    State2 right_start() const {
        const double ld = -eq.p + (eq.a / (2.0 * eq.p) - 1.0) / L;
        return State2{1.0, (L * L + 1.0) * ld};
    }
    State2 left_start() const {
        const double ld = eq.p + (eq.a / (2.0 * eq.p) + 1.0) / L;
        return State2{1.0, (L * L + 1.0) * ld};
    }
};

inline AxisState assemble_axis_state(int m, double p, double a, double lambda,
                                     double tol = 1e-12, double L_needed = 0.0) {
    AxisState st;
    st.eq = AxisEquation{lambda, m, p, a};
    st.L = std::min(std::max({30.0 / p, 12.0, L_needed}), 200.0);
    st.tol = tol;

    const State2 yr = integrate_to(st.eq, st.right_start(), st.L, 0.0, tol);
    const State2 yl = integrate_to(st.eq, st.left_start(), -st.L, 0.0, tol);
    const double nr = std::hypot(yr[0], yr[1]);
    if (std::abs(yr[0]) >= std::abs(yr[1]))
        st.kappa = yr[0] / yl[0];
    else
        st.kappa = yr[1] / yl[1];
    st.glue_mismatch =
        std::hypot(yr[0] - st.kappa * yl[0], yr[1] - st.kappa * yl[1]) / nr;
    return st;
}

// Sample the glued state on an arbitrary grid (any order, |xi| <= L).
// Positive points come from the right branch, negative from the left; each
// value is an exact integration endpoint.
inline GridFunction eval_axis_state(const AxisState& st,
                                    const std::vector<double>& xi) {
    std::vector<size_t> idx(xi.size());
    std::iota(idx.begin(), idx.end(), size_t(0));
    std::vector<size_t> pos, neg;
    for (size_t i : idx) {
        if (std::abs(xi[i]) > st.L)
            throw validation_error("xi out of range: |xi| must be <= " +
                                   std::to_string(st.L));
        (xi[i] >= 0.0 ? pos : neg).push_back(i);
    }
    // right branch walks downward from L, left branch upward from -L
    std::sort(pos.begin(), pos.end(),
              [&](size_t i, size_t j) { return xi[i] > xi[j]; });
    std::sort(neg.begin(), neg.end(),
              [&](size_t i, size_t j) { return xi[i] < xi[j]; });

    GridFunction out;
    out.xi = xi;
    out.x.assign(xi.size(), 0.0);
    out.dx.assign(xi.size(), 0.0);
    if (!pos.empty()) {
        std::vector<double> pts;
        pts.reserve(pos.size());
        for (size_t i : pos) pts.push_back(xi[i]);
        const auto vals = sample_path(st.eq, st.right_start(), st.L, pts, st.tol);
        for (size_t k = 0; k < pos.size(); ++k) {
            const double s2 = pts[k] * pts[k] + 1.0;
            out.x[pos[k]] = st.amp * vals[k][0];
            out.dx[pos[k]] = st.amp * vals[k][1] / s2;
        }
    }
    if (!neg.empty()) {
        std::vector<double> pts;
        pts.reserve(neg.size());
        for (size_t i : neg) pts.push_back(xi[i]);
        const auto vals = sample_path(st.eq, st.left_start(), -st.L, pts, st.tol);
        for (size_t k = 0; k < neg.size(); ++k) {
            const double s2 = pts[k] * pts[k] + 1.0;
            out.x[neg[k]] = st.amp * st.kappa * vals[k][0];
            out.dx[neg[k]] = st.amp * st.kappa * vals[k][1] / s2;
        }
    }
    return out;
}

inline std::vector<double> uniform_grid(double lo, double hi, int n) {
    std::vector<double> g(static_cast<size_t>(n), 0.0);
    for (int i = 0; i < n; ++i)
        g[size_t(i)] = lo + (hi - lo) * double(i) / double(n - 1);
    return g;
}

// Normalize so max |X| = 1 on the core window [-12/p, 12/p].
inline void normalize_max_abs(AxisState& st) {
    st.amp = 1.0;
    const double R = 12.0 / st.eq.p;
    const GridFunction g = eval_axis_state(st, uniform_grid(-R, R, 2001));
    double mx = 0.0;
    for (double v : g.x) mx = std::max(mx, std::abs(v));
    if (mx == 0.0) throw numeric_error("state vanished identically");
    st.amp = 1.0 / mx;
}

// Normalize so the L2 norm over the whole axis is 1; the quadrature is
// exact, carried as an extra ODE component Z' = X^2 along each branch.
inline void normalize_l2(AxisState& st) {
    st.amp = 1.0;
    const State2 r0 = st.right_start();
    const State2 l0 = st.left_start();
    const State3 yr = integrate_to(st.eq, State3{r0[0], r0[1], 0.0}, st.L, 0.0, st.tol);
    const State3 yl = integrate_to(st.eq, State3{l0[0], l0[1], 0.0}, -st.L, 0.0, st.tol);
    const double total = std::abs(yr[2]) + st.kappa * st.kappa * std::abs(yl[2]);
    if (total <= 0.0) throw numeric_error("state vanished identically");
    st.amp = 1.0 / std::sqrt(total);
}

// Count sign changes of sampled values.  Samples below 1e-6 of the max are
// ignored so grazing near-zeros are not double counted.
inline int count_sign_changes(const std::vector<double>& x) {
    double mx = 0.0;
    for (double v : x) mx = std::max(mx, std::abs(v));
    int count = 0;
    int prev_sign = 0;
    for (double v : x) {
        if (std::abs(v) <= 1e-6 * mx) continue;
        const int s = v > 0.0 ? 1 : -1;
        if (prev_sign != 0 && s != prev_sign) ++count;
        prev_sign = s;
    }
    return count;
}

// Count sign changes of X on [-12/p, 12/p].
inline int count_nodes(const AxisState& st, int samples = 2001) {
    const double R = 12.0 / st.eq.p;
    const GridFunction g = eval_axis_state(st, uniform_grid(-R, R, samples));
    return count_sign_changes(g.x);
}

// Max of |d/dxi[Q] - bracket X| on [lo, hi], with the flux derivative taken
// by a central difference of exactly integrated Q values, normalized by the
// max of |X| on the window.  Stencil points never straddle the glue at 0.
inline double ode_residual_max(const AxisState& st, double lo = -10.0,
                               double hi = 10.0, int npts = 401,
                               double h = 3e-5) {
    std::vector<double> centers = uniform_grid(lo, hi, npts);
    std::vector<double> pts;
    pts.reserve(centers.size() * 3);
    for (double c : centers) {
        if (std::abs(c) <= h) continue; // avoid mixing branches across 0
        if (c > 0.0 && c - h < 0.0) continue;
        if (c < 0.0 && c + h > 0.0) continue;
        pts.push_back(c - h);
        pts.push_back(c);
        pts.push_back(c + h);
    }
    std::vector<double> flat = pts;
    const GridFunction g = eval_axis_state(st, flat);
    double mx = 0.0;
    for (size_t i = 1; i + 1 < g.x.size(); i += 3) mx = std::max(mx, std::abs(g.x[i]));
    if (mx == 0.0) return 0.0;
    double worst = 0.0;
    for (size_t i = 0; i + 2 < g.x.size(); i += 3) {
        const double c = g.xi[i + 1];
        const double s2m = g.xi[i] * g.xi[i] + 1.0;
        const double s2p = g.xi[i + 2] * g.xi[i + 2] + 1.0;
        const double Qm = g.dx[i] * s2m;
        const double Qp = g.dx[i + 2] * s2p;
        const double dQ = (Qp - Qm) / (2.0 * h);
        const double res = dQ - st.eq.bracket(c) * g.x[i + 1];
        worst = std::max(worst, std::abs(res));
    }
    return worst / mx;
}

} // namespace sphfun
