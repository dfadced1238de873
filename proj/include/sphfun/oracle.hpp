#pragma once

#include <cmath>
#include <vector>

#include "odes.hpp"
#include "types.hpp"

namespace sphfun {

// Brute-force arbiter, fully independent of the series machinery: integrate
// the decaying solution inward from both ends and measure the normalized
// Wronskian mismatch at xi = 0. Zero mismatch <=> square-integrable state.
//
// Right tail: X ~ e^{-p xi} xi^{a/2p - 1}, log-derivative -p + (a/2p-1)/L.
// Left tail:  X ~ e^{+p xi} |xi|^{-a/2p - 1}, log-derivative p + (a/2p+1)/L.
inline double shoot_mismatch(double lambda, int m, double p, double a,
                             double L = 0.0, double tol = 1e-12) {
    if (L <= 0.0) L = std::max(30.0 / p, 12.0);
    const AxisEquation eq{lambda, m, p, a};
    const double s2L = L * L + 1.0;

    const double ld_r = -p + (a / (2.0 * p) - 1.0) / L;
    State2 yr{1.0, s2L * ld_r};
    yr = integrate_to(eq, yr, L, 0.0, tol);

    const double ld_l = p + (a / (2.0 * p) + 1.0) / L;
    State2 yl{1.0, s2L * ld_l};
    yl = integrate_to(eq, yl, -L, 0.0, tol);

    const double nr = std::hypot(yr[0], yr[1]);
    const double nl = std::hypot(yl[0], yl[1]);
    return (yl[0] * yr[1] - yr[0] * yl[1]) / (nr * nl);
}

// Bisect a sign change of the mismatch down to |hi-lo| <= tol.
inline double shoot_refine(int m, double p, double a, double lo, double hi,
                           double tol = 1e-10) {
    double flo = shoot_mismatch(lo, m, p, a);
    double fhi = shoot_mismatch(hi, m, p, a);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0) == (fhi > 0))
        throw convergence_error("shooting mismatch has no sign change on the bracket");
    for (int it = 0; it < 200 && hi - lo > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = shoot_mismatch(mid, m, p, a);
        if (fm == 0.0) return mid;
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Grow a bracket around a guess until the mismatch changes sign, then refine.
inline double shoot_refine_near(int m, double p, double a, double guess,
                                double halfwidth = 0.05, double tol = 1e-10) {
    for (int k = 0; k < 8; ++k, halfwidth *= 2.0) {
        const double lo = guess - halfwidth, hi = guess + halfwidth;
        const double flo = shoot_mismatch(lo, m, p, a);
        const double fhi = shoot_mismatch(hi, m, p, a);
        if ((flo > 0) != (fhi > 0)) return shoot_refine(m, p, a, lo, hi, tol);
    }
    throw convergence_error("no mismatch sign change near the guess");
}

// Scan [lo, hi] for all mismatch zeros (ascending in lambda).
inline std::vector<double> shoot_eigenvalues(int m, double p, double a,
                                             double lo, double hi,
                                             double step = 0.05,
                                             double tol = 1e-10) {
    std::vector<double> roots;
    double prev_l = lo, prev_f = shoot_mismatch(lo, m, p, a);
    for (double l = lo + step; l < hi + step * 0.5; l += step) {
        const double f = shoot_mismatch(l, m, p, a);
        if (prev_f == 0.0)
            roots.push_back(prev_l);
        else if ((f > 0) != (prev_f > 0))
            roots.push_back(shoot_refine(m, p, a, prev_l, l, tol));
        prev_l = l;
        prev_f = f;
    }
    return roots;
}

} // namespace sphfun
