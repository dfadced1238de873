#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "recurrence.hpp"
#include "types.hpp"

namespace sphfun {

// Backward recursion on the five-term rows, carrying the two-dimensional
// recessive pair seeded at the truncation edge: f_{N+1} = f_{N+2} = 0,
// f_N = (1,0), f_{N-1} = (0,1).  Row E_n determines f_{n-2}; rows n = N
// down to n_stop+2 are consumed, so values are available for
// n in [n_stop, N+2].
struct RecessivePair {
    int n_min = 0;
    int N = 0;
    std::vector<std::array<cplx, 2>> vals; // vals[n - n_min]
    double log_scale = 0.0;                // true f = vals * exp(log_scale)
    int rescale_count = 0;

    const std::array<cplx, 2>& at(int n) const { return vals[size_t(n - n_min)]; }
};

inline RecessivePair recessive_pair(const FiveTermTable& T, int N, int n_stop) {
    if (N < n_stop + 2) throw validation_error("N too small for the requested tail");
    RecessivePair out;
    out.n_min = n_stop;
    out.N = N;
    out.vals.assign(size_t(N + 3 - n_stop), {cplx(0.0), cplx(0.0)});
    auto at = [&](int n) -> std::array<cplx, 2>& { return out.vals[size_t(n - n_stop)]; };
    at(N)[0] = 1.0;
    at(N - 1)[1] = 1.0;
    for (int n = N; n >= n_stop + 2; --n) {
        const cplx piv = T.weight(n, -2);
        if (piv == cplx(0.0))
            throw numeric_error("dead pivot at row n=" + std::to_string(n));
        double mx = 0.0;
        for (int i = 0; i < 2; ++i) {
            const cplx s = T.weight(n, -1) * at(n - 1)[i] + T.weight(n, 0) * at(n)[i] +
                           T.weight(n, 1) * at(n + 1)[i] + T.weight(n, 2) * at(n + 2)[i];
            at(n - 2)[i] = -s / piv;
            mx = std::max(mx, std::abs(at(n - 2)[i]));
        }
        if (mx > 1e100) {
            for (auto& v : out.vals) {
                v[0] /= mx;
                v[1] /= mx;
            }
            out.log_scale += std::log(mx);
            ++out.rescale_count;
        }
    }
    return out;
}

// One arc's cascade for one seed: full coefficient vector f[0..N+2] plus the
// four leftover row values.  Rows N..2m+2 are satisfied by the recursion,
// rows E_{2m}..E_1 by a band solve for f_{2m-1}..f_0 (m >= 1); what remains
// are the residual slots r1 = E_{2m+1}, r2 = E_0 and the spill rows
// sm1 = E_{-1} = -2(p+i sig)(2m+1) f_0, sm2 = E_{-2} = (2m+1) f_0.
// All four are divided by max|f|.
struct SideSeed {
    std::vector<cplx> f; // f[0..N+2]
    double scale = 0.0;  // max |f|
    cplx r1, r2, sm1, sm2;
};

inline std::array<SideSeed, 2> side_cascade(int m, double p, double a, double lambda,
                                            int N, Branch side) {
    const double aa = (side == Branch::right) ? a : -a;
    const FiveTermTable T = five_term_table(m, p, aa, lambda, SetId::f_set);
    // Tail down to n = 2m: the last usable recursion row is n = 2m+2 (the
    // pivot dies at n = 2m+1).
    const RecessivePair pair = recessive_pair(T, N, 2 * m);

    std::array<SideSeed, 2> out;
    for (int si = 0; si < 2; ++si) {
        SideSeed& S = out[size_t(si)];
        S.f.assign(size_t(N + 3), cplx(0.0));
        for (int n = 2 * m; n <= N + 2; ++n) S.f[size_t(n)] = pair.at(n)[size_t(si)];
        if (m >= 1) {
            // Band solve rows E_{2m}..E_1 for f_{2m-1}..f_0; the pivot chain
            // G(n,-2) is dead at n = 2m+1 and n = 1, which is exactly why
            // these rows are solved jointly instead of by recursion.
            const int dim = 2 * m;
            Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(dim, dim);
            Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(dim);
            int r = 0;
            for (int n = 2 * m; n >= 1; --n, ++r) {
                cplx acc = 0.0;
                for (int d = -2; d <= 2; ++d) {
                    const int j = n + d;
                    if (j < 0) continue;
                    const cplx g = T.weight(n, d);
                    if (j <= 2 * m - 1)
                        B(r, j) = g;
                    else
                        acc += g * S.f[size_t(j)];
                }
                rhs(r) = -acc;
            }
            Eigen::VectorXcd sol = B.partialPivLu().solve(rhs);
            for (int j = 0; j < dim; ++j) S.f[size_t(j)] = sol(j);
        }
        // m = 0: f_0 = f_{2m} already came from the tail; nothing to solve.

        auto row = [&](int s) {
            cplx acc = 0.0;
            for (int d = -2; d <= 2; ++d) {
                const int j = s + d;
                if (j >= 0 && j <= N + 2) acc += T.weight(s, d) * S.f[size_t(j)];
            }
            return acc;
        };

        S.scale = 0.0;
        for (const cplx& v : S.f) S.scale = std::max(S.scale, std::abs(v));
        if (S.scale == 0.0) S.scale = 1.0;
        S.r1 = row(2 * m + 1) / S.scale;
        S.r2 = row(0) / S.scale;
        S.sm1 = row(-1) / S.scale;
        S.sm2 = row(-2) / S.scale;
    }
    return out;
}

// det[[r1, r1'], [r2, r2']] over the two seeds, normalized by the product of
// column norms, so the value lives in the unit disc.  Its zeros interlace the
// eigenvalues; it is a structure diagnostic, not the eigenvalue detector.
inline cplx side_determinant(int m, double p, double a, double lambda, int N,
                             Branch side = Branch::right) {
    const auto s = side_cascade(m, p, a, lambda, N, side);
    const cplx det = s[0].r1 * s[1].r2 - s[1].r1 * s[0].r2;
    const double n0 = std::hypot(std::abs(s[0].r1), std::abs(s[0].r2));
    const double n1 = std::hypot(std::abs(s[1].r1), std::abs(s[1].r2));
    if (n0 == 0.0 || n1 == 0.0) return 0.0;
    return det / (n0 * n1);
}

} // namespace sphfun
