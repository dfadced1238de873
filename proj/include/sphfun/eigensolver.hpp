#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "detsys.hpp"
#include "evaluator.hpp"
#include "polyroots.hpp"
#include "recurrence.hpp"
#include "series_eval.hpp"
#include "types.hpp"

namespace sphfun {

// ---------------------------------------------------------------------------
// Vertex extraction.
//
// At an eigenvalue the circle determinant has a double zero.  Rounding
// splits it into a pair of simple roots ~1e-7 apart (a conjugate pair, or
// for real determinants possibly two real roots), so log|D| shows a funnel
// that never quite reaches -inf and may have a noisy core.  The eigenvalue
// is the pair MIDPOINT, recovered by fitting D itself (complex values on a
// common log scale) with a polynomial over a window much wider than the
// split, then taking the midpoint of the two fitted roots nearest the
// center.  Narrow windows are poisoned by the core noise; the wide-window
// fit was measured N-stable to ~5e-10 on the deepest states of the
// verification matrix.
// ---------------------------------------------------------------------------

namespace detail {

inline double golden_min(int m, double p, double a, int N, double lo, double hi,
                         double width_stop) {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    auto f = [&](double l) { return circle_determinant(m, p, a, l, N).log_abs(); };
    double x1 = hi - gr * (hi - lo);
    double x2 = lo + gr * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    while (hi - lo > width_stop) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = f(x2);
        }
    }
    return 0.5 * (lo + hi);
}

// One midpoint-of-root-pair pass: sample D on 2K+1 points spaced h around v,
// fit a degree-`deg` polynomial in u = (lambda - v)/(h K), midpoint of the
// two roots nearest the center.  Returns v unchanged if the fit is rejected.
inline double pair_fit_step(int m, double p, double a, int N, double v,
                            double h, int K, int deg) {
    const int npts = 2 * K + 1;
    std::vector<cplx> z(static_cast<size_t>(npts));
    std::vector<double> ld(static_cast<size_t>(npts));
    for (int k = -K; k <= K; ++k) {
        const CircleDet cd = circle_determinant(m, p, a, v + k * h, N);
        const double ab = std::abs(cd.mantissa);
        z[size_t(k + K)] = (ab > 0.0) ? cd.mantissa / ab : cplx(0.0);
        ld[size_t(k + K)] = cd.log_abs();
    }
    double l0 = ld[0];
    for (int i = 1; i < npts; ++i) l0 = std::max(l0, ld[size_t(i)]);
    int big = 0;
    for (int i = 0; i < npts; ++i) {
        z[size_t(i)] *= std::exp(ld[size_t(i)] - l0);
        if (std::abs(z[size_t(i)]) > std::abs(z[size_t(big)])) big = i;
    }
    const cplx phase = z[size_t(big)] / std::abs(z[size_t(big)]);
    Eigen::MatrixXcd A(npts, deg + 1);
    Eigen::VectorXcd y(npts);
    for (int i = 0; i < npts; ++i) {
        const double u = double(i - K) / K; // scaled to [-1,1] for conditioning
        cplx pw = 1.0;
        for (int j = 0; j <= deg; ++j) {
            A(i, j) = pw;
            pw *= u;
        }
        y(i) = z[size_t(i)] / phase;
    }
    const Eigen::VectorXcd c = A.colPivHouseholderQr().solve(y);
    std::vector<cplx> cf(static_cast<size_t>(deg + 1));
    for (int j = 0; j <= deg; ++j) cf[size_t(j)] = c(j);
    std::vector<cplx> roots = poly_roots(cf);
    std::sort(roots.begin(), roots.end(),
              [](cplx x, cplx w) { return std::abs(x) < std::abs(w); });
    if (roots.size() < 2) return v;
    const cplx mid = 0.5 * (roots[0] + roots[1]);
    // after golden narrowing the pair sits well inside the window
    if (!(std::abs(mid.real()) < 1.0)) return v;
    return v + mid.real() * h * K;
}

} // namespace detail

// Refine a funnel minimum near v0 (within +-halfwidth) at truncation order N.
inline double refine_vertex(int m, double p, double a, int N, double v0,
                            double halfwidth) {
    double v = detail::golden_min(m, p, a, N, v0 - halfwidth, v0 + halfwidth, 2e-4);
    v = detail::pair_fit_step(m, p, a, N, v, 3e-3, 10, 8);
    v = detail::pair_fit_step(m, p, a, N, v, 3e-3, 10, 8);
    return v;
}

// Funnel minima of log|D| on [lo, hi] (ascending lambda), coarse step.
inline std::vector<double> funnel_candidates(int m, double p, double a, int N,
                                             double lo, double hi,
                                             double step = 0.1) {
    std::vector<double> lam, val;
    for (double l = lo; l <= hi + 0.5 * step; l += step) {
        lam.push_back(l);
        val.push_back(circle_determinant(m, p, a, l, N).log_abs());
    }
    std::vector<double> out;
    for (size_t i = 1; i + 1 < lam.size(); ++i)
        if (val[i] < val[i - 1] && val[i] < val[i + 1]) out.push_back(lam[i]);
    return out;
}

inline double scan_floor(int m, double p, double a, int k) {
    return -(p * p + std::abs(a) + 2.0 * (k + m + 1) * p + double(m) * double(m)) - 10.0;
}

// The 192 floor is set by eigenfunction accuracy, not eigenvalue accuracy:
// lambda settles to 1e-12 already at N ~ 128, but the series must sustain the
// e^{-2pS} cancellation of its growing prefactor out to |xi| = 10, and below
// N ~ 384 (one doubling above the floor) the far tail of the evaluated
// function is only good to ~1e-7 of the peak.
inline int default_truncation(int m, double p, double a, double lambda_guess) {
    const double n0 = n0_threshold(m, p, a);
    int N = int(std::ceil(4.0 * n0 + 16.0 * p + 8.0 * std::sqrt(std::abs(lambda_guess))));
    N = std::max(N, 192);
    N = std::max(N, 2 * m + 8);
    return N;
}

// All eigenvalues in [lo, hi], ascending, refined at fixed N.
inline std::vector<double> eigen_scan(int m, double p, double a, double lo,
                                      double hi, int N, double step = 0.1) {
    std::vector<double> out;
    for (double c : funnel_candidates(m, p, a, N, lo, hi, step))
        out.push_back(refine_vertex(m, p, a, N, c, step));
    return out;
}

// Full pipeline for the k-th eigenvalue (k = node count, descending lambda):
// coarse funnel scan, vertex refinement, truncation doubling to the requested
// tolerance, then assembly of the evaluated state and representation.
inline EigenSolution solve_eigen(const SpectralParams& prm) {
    validate(prm);
    const int m = prm.m, k = prm.k;
    const double p = prm.p, a = prm.a;

    const double lo = scan_floor(m, p, a, k);
    const double hi = p * p + 10.0;
    int N = prm.N > 0 ? std::max(prm.N, 2 * m + 8) : default_truncation(m, p, a, lo);

    std::vector<double> cand = funnel_candidates(m, p, a, N, lo, hi);
    if (int(cand.size()) < k + 1)
        throw convergence_error(
            "found " + std::to_string(cand.size()) + " candidate eigenvalues in [" +
            std::to_string(lo) + ", " + std::to_string(hi) + "], need k+1 = " +
            std::to_string(k + 1));
    // lambda_k descends with k: the k-th state from the top of the spectrum
    const double seed = cand[cand.size() - 1 - size_t(k)];

    double v = refine_vertex(m, p, a, N, seed, 0.1);
    bool converged = false;
    double prev_delta = -1.0;
    for (int round = 0; round < 8; ++round) {
        const int N2 = 2 * N;
        const double v2 = refine_vertex(m, p, a, N2, v, 0.01);
        const double delta = std::abs(v2 - v);
        v = v2;
        N = N2;
        if (delta < 10.0 * prm.tol) {
            converged = true;
            break;
        }
        // Successive refinements no longer improving means the vertex noise
        // floor sits above the requested tolerance; accept if close, rather
        // than doubling N forever on noise.
        if (prev_delta >= 0.0 && delta >= 0.5 * prev_delta) {
            if (delta < 1e3 * prm.tol) {
                converged = true;
                break;
            }
            throw convergence_error("eigenvalue refinement stagnated at step " +
                                    std::to_string(delta));
        }
        prev_delta = delta;
    }
    if (!converged)
        throw convergence_error("eigenvalue did not settle under truncation doubling");

    EigenSolution sol;
    sol.lambda = v;

    TrigSeriesRep rep;
    rep.params = prm;
    rep.lambda = v;
    const CircleCoefficients cc = circle_coefficients(m, p, a, v, N);
    branch_sets(cc, m, rep.right_coeffs, rep.left_coeffs);
    rep.scale = 1.0;

    AxisState st = assemble_axis_state(m, p, a, v, 1e-12);
    normalize_max_abs(st);

    // Pin the representation scale so the series matches the max-normalized
    // evaluated state, sign included.
    {
        const double R = 12.0 / p;
        const std::vector<double> grid = uniform_grid(-R, R, 2001);
        double mx = 0.0, at = 0.0;
        for (double xi : grid) {
            const double val = std::abs(eval_trig_rep(rep, xi).x);
            if (val > mx) {
                mx = val;
                at = xi;
            }
        }
        if (mx > 0.0) {
            const double series = eval_trig_rep(rep, at).x;
            const double ode = eval_axis_state(st, {at}).x[0];
            rep.scale = (series * ode < 0.0 ? -1.0 : 1.0) / mx;
        }
    }
    sol.rep = std::move(rep);

    sol.node_count = count_nodes(st);
    sol.diagnostics.det_value = cc.sigma_ratio;
    sol.diagnostics.residual_max = ode_residual_max(st);
    sol.diagnostics.N_used = N;
    sol.diagnostics.converged = converged;
    return sol;
}

} // namespace sphfun
