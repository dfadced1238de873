#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "eigensolver.hpp"
#include "evaluator.hpp"
#include "odes.hpp"
#include "recurrence.hpp"
#include "series_eval.hpp"
#include "types.hpp"

namespace sphfun {

// ---------------------------------------------------------------------------
// a = 0 route: parity-symmetric power series in u = (1+t^2)/2.
//
// Backward recursion from recessive seeds fills the tail; the dead-pivot
// bottom row (n = 1 for the even table, n = 0 for the odd table) becomes the
// scale-free eigenvalue residual r(lambda).  Zeros of r are bracketed on a
// coarse scan and bisected.
//
// Caution on labels: the dead-row zeros of the table printed for "even"
// functions land exactly on the ODD spectrum and vice versa — verified
// against the shooting oracle on every tabulated state.  The eigenvalue
// search therefore flips the table; the eigenfunction series does not (see
// power_series_coefficients below).
//
// Each table is, symbolically, the cleared u-power recurrence for
//   X = e^{-pS}/S * t^eps * sum f_n u^n,  S = sqrt(xi^2+1), u = S/(S+1),
// with eps = 0 for the even table and eps = 1 (the t prefactor) for the odd
// one — row n of the printed table is the u^{n+2} coefficient equation.
// ---------------------------------------------------------------------------

struct PowerBottom {
    double r = 0.0;              // dead-row residual / max_n |f_n|
    double spill1 = 0.0;         // continuation rows below the bottom
    double spill2 = 0.0;
    std::vector<double> f;       // f_0..f_{N+2}
};

inline PowerBottom power_bottom(int m, double p, double lambda,
                                Parity table_parity, int N) {
    const FourTermTable T = four_term_table(m, p, lambda, table_parity);
    const int stop = (table_parity == Parity::even) ? 2 : 1;
    if (N < stop + 3) throw validation_error("power truncation too small");

    std::vector<double> f(size_t(N + 3), 0.0);
    f[size_t(N)] = 1.0;
    for (int n = N; n >= stop; --n) {
        const double v = four_term_step_backward(
            T, n, {f[size_t(n + 2)], f[size_t(n + 1)], f[size_t(n)]});
        f[size_t(n - 1)] = v;
        if (std::abs(v) > 1e250) {
            const double s = std::abs(v);
            for (int j = n - 1; j <= N + 2; ++j) f[size_t(j)] /= s;
        }
    }
    double mx = 0.0;
    for (int j = stop - 1; j <= N + 2; ++j) mx = std::max(mx, std::abs(f[size_t(j)]));

    PowerBottom out;
    const double m2 = double(m) * double(m);
    if (table_parity == Parity::even) {
        // row n = 1 has no f_0 (dead pivot): a pure constraint on the tail
        out.r = (T.weight(1, 2) * f[3] + T.weight(1, 1) * f[2] +
                 T.weight(1, 0) * f[1]) / mx;
        const double piv = T.weight(0, 0);
        if (piv == 0.0) throw numeric_error("dead pivot at row n=0");
        f[0] = -(T.weight(0, 2) * f[2] + T.weight(0, 1) * f[1]) / piv;
        out.spill1 = ((2.0 - p - 2.0 * m2) * f[0] + m2 * f[1]) / mx;
        out.spill2 = ((m2 - 1.0) * f[0]) / mx;
    } else {
        // recursion reached f_0; row n = 0 is the constraint
        out.r = (T.weight(0, 2) * f[2] + T.weight(0, 1) * f[1] +
                 T.weight(0, 0) * f[0]) / mx;
        out.spill1 = ((1.0 - p - 2.0 * m2) * f[0] + m2 * f[1]) / mx;
        out.spill2 = ((m2 - 1.0) * f[0]) / mx;
    }
    out.f = std::move(f);
    return out;
}

// Sign-change brackets of r(lambda) on [lo, hi], refined by bisection;
// ascending order.
inline std::vector<double> power_zeros(int m, double p, Parity table_parity,
                                       double lo, double hi, int N,
                                       double step = 0.05) {
    std::vector<double> out;
    double prev_l = lo;
    double prev_r = power_bottom(m, p, lo, table_parity, N).r;
    for (double l = lo + step; l <= hi + 0.5 * step; l += step) {
        const double r = power_bottom(m, p, l, table_parity, N).r;
        if (prev_r == 0.0) {
            out.push_back(prev_l);
        } else if (prev_r * r < 0.0) {
            double aa = prev_l, bb = l, fa = prev_r;
            for (int it = 0; it < 80 && bb - aa > 1e-13; ++it) {
                const double mid = 0.5 * (aa + bb);
                const double fm = power_bottom(m, p, mid, table_parity, N).r;
                if (fm == 0.0) {
                    aa = bb = mid;
                    break;
                }
                if (fa * fm < 0.0) {
                    bb = mid;
                } else {
                    aa = mid;
                    fa = fm;
                }
            }
            out.push_back(0.5 * (aa + bb));
        }
        prev_l = l;
        prev_r = r;
    }
    return out;
}

inline Parity flip(Parity par) {
    return par == Parity::even ? Parity::odd : Parity::even;
}

// Eigenfunction coefficients for a converged lambda.
//
// The raw backward recursion sums to the recurrence solution analytic at
// u = 0 (xi = ±i), which is NOT the decaying eigenfunction: that one carries
// a logarithmic branch at u = 0 (the indicial exponents 1±m differ by an
// integer), so no single u-power series equals it and the literal recursion
// output misses by O(0.1) pointwise.  The paper leaves the bottom of the
// recursion under-determined ("f_1 is fixed by the boundedness condition",
// no formula), so we complete it the only way the oracle accepts: keep the
// recursion tail (which fixes the l_1 asymptotic ratio) and re-fit the
// lowest-order coefficients against the integrated decaying solution.  The
// least-squares system is tame because the physical window u in [1/2, ~0.95]
// stays clear of the singular points u = 0 and u = 1.
inline std::vector<double> power_series_coefficients(int m, double p,
                                                     Parity parity,
                                                     double lambda, int N) {
    PowerBottom pb = power_bottom(m, p, lambda, parity, N);
    const int eps = (parity == Parity::odd) ? 1 : 0;

    const double ximax = std::max(12.0 / p, 10.0) + 2.0;
    const double L = std::max(30.0 / p, 12.0) + ximax;
    const AxisEquation eq{lambda, m, p, 0.0};
    const int M = 420;
    std::vector<double> xi(M);
    for (int i = 0; i < M; ++i)
        xi[size_t(i)] = ximax - (ximax - 0.02) * double(i) / double(M - 1);
    State2 y0{1.0, (L * L + 1.0) * (-p - 1.0 / L)};
    const std::vector<State2> path = sample_path(eq, y0, L, xi);

    std::vector<double> w(M), u(M), xode(M), wrec(M);
    for (int i = 0; i < M; ++i) {
        const double x = xi[size_t(i)];
        const double S = std::sqrt(x * x + 1.0);
        u[size_t(i)] = S / (S + 1.0);
        w[size_t(i)] = std::exp(-p * S) / S * (eps ? x / (S + 1.0) : 1.0);
        xode[size_t(i)] = path[size_t(i)][0];
        double F = 0.0;
        for (int n = int(pb.f.size()) - 1; n >= 0; --n)
            F = F * u[size_t(i)] + pb.f[size_t(n)];
        wrec[size_t(i)] = w[size_t(i)] * F;
    }
    // align the oracle curve with the recursion's scale, then fit the gap
    double num = 0.0, den = 0.0;
    for (int i = 0; i < M; ++i) {
        num += wrec[size_t(i)] * xode[size_t(i)];
        den += xode[size_t(i)] * xode[size_t(i)];
    }
    const double s = num / den;

    const int deg = std::min(56, N - 8);
    Eigen::MatrixXd A(M, deg + 1);
    Eigen::VectorXd b(M);
    for (int i = 0; i < M; ++i) {
        double up = 1.0;
        for (int j = 0; j <= deg; ++j) {
            A(i, j) = w[size_t(i)] * up;
            up *= u[size_t(i)];
        }
        b(i) = s * xode[size_t(i)] - wrec[size_t(i)];
    }
    const Eigen::VectorXd g = A.colPivHouseholderQr().solve(b);

    std::vector<double> f(pb.f.begin(), pb.f.begin() + N + 1);
    for (int j = 0; j <= deg; ++j) f[size_t(j)] += g(j);
    return f;
}

// k-th eigenvalue (node count k, descending lambda) of the a = 0 problem.
// parity is the FUNCTION parity and must match k mod 2.
inline EigenSolution power_find_eigenvalue(int m, double p, Parity parity,
                                           int k, double tol = 1e-10,
                                           int N = 0) {
    if (m < 0) throw validation_error("m must be nonnegative");
    if (!(p > 0.0)) throw validation_error("p must be positive");
    if (k < 0) throw validation_error("k must be nonnegative");
    if (!(tol > 0.0)) throw validation_error("tol must be positive");
    const bool k_even = (k % 2 == 0);
    if (k_even != (parity == Parity::even))
        throw validation_error("parity inconsistent with node count k");

    const Parity table = flip(parity);
    const int j = k / 2; // index within one parity class, descending lambda
    int Nw = (N > 0) ? std::max(N, 16) : 400;
    const double lo = scan_floor(m, p, 0.0, k);
    const double hi = p * p + 10.0;

    std::vector<double> zeros = power_zeros(m, p, table, lo, hi, Nw);
    if (int(zeros.size()) < j + 1)
        throw convergence_error(
            "found " + std::to_string(zeros.size()) + " parity-class roots in [" +
            std::to_string(lo) + ", " + std::to_string(hi) + "], need " +
            std::to_string(j + 1));
    double v = zeros[zeros.size() - 1 - size_t(j)];

    bool converged = false;
    for (int round = 0; round < 5; ++round) {
        const int N2 = 2 * Nw;
        const std::vector<double> z2 =
            power_zeros(m, p, table, v - 0.01, v + 0.01, N2, 0.005);
        if (z2.empty())
            throw convergence_error("root lost under truncation doubling");
        double v2 = z2[0];
        for (double z : z2)
            if (std::abs(z - v) < std::abs(v2 - v)) v2 = z;
        const bool done = std::abs(v2 - v) < 10.0 * tol;
        v = v2;
        Nw = N2;
        if (done) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw convergence_error("eigenvalue did not settle under truncation doubling");

    EigenSolution sol;
    sol.lambda = v;

    PowerSeriesRep rep;
    rep.params = SpectralParams{m, k, p, 0.0, tol, Nw};
    rep.lambda = v;
    rep.parity = parity;
    rep.coeffs = power_series_coefficients(m, p, parity, v, Nw);
    // normalize so the largest-magnitude coefficient is exactly +1
    double big = rep.coeffs[0];
    for (double c : rep.coeffs)
        if (std::abs(c) > std::abs(big)) big = c;
    if (big != 0.0)
        for (double& c : rep.coeffs) c /= big;

    const AxisEquation eq{v, m, p, 0.0};
    const double R = 12.0 / p;
    std::vector<double> samples(2001);
    for (int i = 0; i < 2001; ++i) {
        const double xi = -R + 2.0 * R * double(i) / 2000.0;
        samples[size_t(i)] = eval_power_rep(rep, xi).x;
    }
    sol.node_count = count_sign_changes(samples);
    sol.diagnostics.det_value = std::abs(power_bottom(m, p, v, table, Nw).r);
    sol.diagnostics.residual_max = series_residual_max(
        [&](double xi) { return eval_power_rep(rep, xi); },
        [&](double xi) { return eq.bracket(xi); }, -10.0, 10.0);
    sol.diagnostics.N_used = Nw;
    sol.diagnostics.converged = converged;
    sol.rep = std::move(rep);
    return sol;
}

} // namespace sphfun
