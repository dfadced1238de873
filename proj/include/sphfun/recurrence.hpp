#pragma once

#include <array>
#include <cmath>
#include <complex>

#include "types.hpp"

namespace sphfun {

enum class SetId { f_set, g_set }; // g_set = f_set with a -> -a

// Five-term recurrence of the trigonometric series, cleared by n^2:
//   W(n,2) f_{n+2} + W(n,1) f_{n+1} + W(n,0) f_n + W(n,-1) f_{n-1} + W(n,-2) f_{n-2} = 0
// with W(n,2) = n^2 + a2 n + b2, W(n,1) = a1 n + b1, W(n,0) = 2n^2 + a0 n + b0,
// W(n,-1) = a-1 n + b-1, W(n,-2) = n^2 + a-2 n + b-2.
//
// The weights factor as
//   W(n, 2) = (n+1)(n-2m+1)
//   W(n, 1) = 2(p+i a/2p)(2n-2m+1)
//   W(n, 0) = 2n^2 - 4mn + 4(lambda + p^2 - (a/2p)^2) + 2
//   W(n,-1) = -2(p-i a/2p)(2n-2m-1)
//   W(n,-2) = (n-1)(n-2m-1)
// so the backward pivot W(n,-2) vanishes at n = 1 and n = 2m+1 (dead rows);
// the stepping engine refuses those rows and the solvers treat them as
// residual constraints instead.
struct FiveTermTable {
    int m = 0;
    double p = 1.0, a = 0.0, lambda = 0.0;
    SetId set_id = SetId::f_set;
    std::array<cplx, 5> alpha{}; // index d+2, d = -2..2
    std::array<cplx, 5> beta{};

    cplx weight(double n, int d) const {
        const cplx al = alpha[d + 2], be = beta[d + 2];
        switch (d) {
            case 2: return n * n + al * n + be;
            case 1: return al * n + be;
            case 0: return 2.0 * n * n + al * n + be;
            case -1: return al * n + be;
            case -2: return n * n + al * n + be;
        }
        throw validation_error("five-term offset must be in [-2,2]");
    }

    // Extended-precision weight for the determinant path.  The long tail
    // recursions accumulate rounding that shows up as ~1e-9 jitter of the
    // funnel vertex at p = 2, N >= 768 when run in double; 80-bit arithmetic
    // pushes that floor three orders of magnitude down.
    std::complex<long double> weight_l(double n, int d) const {
        const std::complex<long double> al(alpha[d + 2].real(), alpha[d + 2].imag());
        const std::complex<long double> be(beta[d + 2].real(), beta[d + 2].imag());
        const long double x = n;
        switch (d) {
            case 2: return x * x + al * x + be;
            case 1: return al * x + be;
            case 0: return 2.0L * x * x + al * x + be;
            case -1: return al * x + be;
            case -2: return x * x + al * x + be;
        }
        throw validation_error("five-term offset must be in [-2,2]");
    }
};

inline FiveTermTable five_term_table(int m, double p, double a, double lambda,
                                     SetId set_id = SetId::f_set) {
    if (!(p > 0.0)) throw validation_error("p must be positive");
    FiveTermTable T;
    T.m = m;
    T.p = p;
    T.a = a;
    T.lambda = lambda;
    T.set_id = set_id;
    const double aa = (set_id == SetId::g_set) ? -a : a;
    const double sig = aa / (2.0 * p);
    const cplx ppl(p, sig);  // p + i a/2p
    const cplx pmi(p, -sig); // p - i a/2p
    T.alpha[2 + 2] = -2.0 * (m - 1.0);
    T.beta[2 + 2] = 1.0 - 2.0 * m;
    T.alpha[1 + 2] = 4.0 * ppl;
    T.beta[1 + 2] = 2.0 * ppl * (1.0 - 2.0 * m);
    T.alpha[0 + 2] = -4.0 * m;
    T.beta[0 + 2] = 4.0 * (lambda + p * p - sig * sig) + 2.0;
    T.alpha[-1 + 2] = -4.0 * pmi;
    T.beta[-1 + 2] = 2.0 * pmi * (2.0 * m + 1.0);
    T.alpha[-2 + 2] = -2.0 * (m + 1.0);
    T.beta[-2 + 2] = 2.0 * m + 1.0;
    return T;
}

// Solve row n for f_{n-2}; window = (f_{n+2}, f_{n+1}, f_n, f_{n-1}).
inline cplx five_term_step_backward(const FiveTermTable& T, int n,
                                    const std::array<cplx, 4>& window) {
    const cplx piv = T.weight(n, -2);
    if (piv == cplx(0.0)) throw numeric_error("dead pivot at row n=" + std::to_string(n));
    const cplx s = T.weight(n, 2) * window[0] + T.weight(n, 1) * window[1] +
                   T.weight(n, 0) * window[2] + T.weight(n, -1) * window[3];
    return -s / piv;
}

// n0 = sqrt(16 a^2/p^2 + 64 m^2): beyond it exactly two quartic roots are
// inside the unit circle.
inline double n0_threshold(int m, double p, double a) {
    if (!(p > 0.0)) throw validation_error("p must be positive");
    return std::sqrt(16.0 * a * a / (p * p) + 64.0 * double(m) * double(m));
}

// Four-term recurrence of the a = 0 power series in u = (1+t^2)/2, cleared:
//   V(n,2) f_{n+2} + V(n,1) f_{n+1} + V(n,0) f_n + V(n,-1) f_{n-1} = 0
// V(n,2) = -n^2 + a2 n + b2, V(n,1) = 4n^2 + a1 n + b1,
// V(n,0) = -5n^2 + a0 n + b0, V(n,-1) = 2n^2 + a-1 n + b-1.
// Even-table pivot V(n,-1) = (2n-1)(n-1) dies at n = 1; odd-table pivot
// n(2n-1) dies at n = 0.
struct FourTermTable {
    int m = 0;
    double p = 1.0, lambda = 0.0;
    Parity parity = Parity::even;
    std::array<double, 4> alpha{}; // index d+1, d = -1..2
    std::array<double, 4> beta{};

    double weight(double n, int d) const {
        const double al = alpha[d + 1], be = beta[d + 1];
        switch (d) {
            case 2: return -n * n + al * n + be;
            case 1: return 4.0 * n * n + al * n + be;
            case 0: return -5.0 * n * n + al * n + be;
            case -1: return 2.0 * n * n + al * n + be;
        }
        throw validation_error("four-term offset must be in [-1,2]");
    }
};

inline FourTermTable four_term_table(int m, double p, double lambda, Parity parity) {
    if (!(p > 0.0)) throw validation_error("p must be positive");
    FourTermTable T;
    T.m = m;
    T.p = p;
    T.lambda = lambda;
    T.parity = parity;
    const double m2 = double(m) * double(m);
    if (parity == Parity::even) {
        T.alpha[2 + 1] = -2.0;
        T.beta[2 + 1] = m2 - 1.0;
        T.alpha[1 + 1] = 2.0 * p + 3.0;
        T.beta[1 + 1] = p - 2.0 * m2 + 1.0;
        T.alpha[0 + 1] = -4.0 * p + 2.0;
        T.beta[0 + 1] = -lambda - p * p + p + m2 - 1.0;
        T.alpha[-1 + 1] = -3.0;
        T.beta[-1 + 1] = 1.0;
    } else {
        T.alpha[2 + 1] = -2.0;
        T.beta[2 + 1] = m2 - 1.0;
        T.alpha[1 + 1] = 2.0 * p + 5.0;
        T.beta[1 + 1] = p - 2.0 * m2 + 2.0;
        T.alpha[0 + 1] = -4.0 * p - 2.0;
        T.beta[0 + 1] = -lambda - p * p - p + m2 - 1.0;
        T.alpha[-1 + 1] = -1.0;
        T.beta[-1 + 1] = 0.0;
    }
    return T;
}

// Solve row n for f_{n-1}; window = (f_{n+2}, f_{n+1}, f_n).
inline double four_term_step_backward(const FourTermTable& T, int n,
                                      const std::array<double, 3>& window) {
    const double piv = T.weight(n, -1);
    if (piv == 0.0) throw numeric_error("dead pivot at row n=" + std::to_string(n));
    const double s = T.weight(n, 2) * window[0] + T.weight(n, 1) * window[1] +
                     T.weight(n, 0) * window[2];
    return -s / piv;
}

} // namespace sphfun
