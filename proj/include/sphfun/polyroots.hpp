#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <vector>

#include "recurrence.hpp"
#include "types.hpp"

namespace sphfun {

// Roots of c[0] + c[1] z + ... + c[deg] z^deg via the companion matrix,
// followed by two Newton polish steps per root.
inline std::vector<cplx> poly_roots(const std::vector<cplx>& c) {
    int deg = int(c.size()) - 1;
    while (deg > 0 && c[deg] == cplx(0.0)) --deg;
    if (deg < 1) throw numeric_error("polynomial has degenerate degree");
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(deg, deg);
    for (int i = 1; i < deg; ++i) C(i, i - 1) = 1.0;
    for (int i = 0; i < deg; ++i) C(i, deg - 1) = -c[i] / c[deg];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, false);
    if (es.info() != Eigen::Success) throw numeric_error("companion eigensolver failed");
    std::vector<cplx> roots(deg);
    for (int i = 0; i < deg; ++i) roots[i] = es.eigenvalues()[i];
    auto horner = [&](cplx z, cplx& val, cplx& der) {
        val = c[deg];
        der = 0.0;
        for (int j = deg - 1; j >= 0; --j) {
            der = der * z + val;
            val = val * z + c[j];
        }
    };
    for (auto& r : roots) {
        for (int it = 0; it < 2; ++it) {
            cplx v, d;
            horner(r, v, d);
            if (std::abs(d) == 0.0) break;
            r -= v / d;
        }
    }
    std::sort(roots.begin(), roots.end(), [](cplx x, cplx y) {
        if (x.real() != y.real()) return x.real() < y.real();
        return x.imag() < y.imag();
    });
    return roots;
}

// Characteristic quartic of the five-term recurrence at row n:
//   (1 + a2/n) l^4 + (a1/n) l^3 + (2 + a0/n) l^2 + (a-1/n) l + (1 + a-2/n) = 0;
// n -> inf limit (l^2+1)^2, roots {i, i, -i, -i}.
inline std::vector<cplx> quartic_roots(const FiveTermTable& T, int n) {
    if (n < 1) throw validation_error("n must be >= 1");
    const double dn = n;
    std::vector<cplx> c(5);
    c[4] = 1.0 + T.alpha[2 + 2] / dn;
    c[3] = T.alpha[1 + 2] / dn;
    c[2] = 2.0 + T.alpha[0 + 2] / dn;
    c[1] = T.alpha[-1 + 2] / dn;
    c[0] = 1.0 + T.alpha[-2 + 2] / dn;
    if (c[4] == cplx(0.0)) throw numeric_error("quartic degenerates at n = -alpha2");
    return poly_roots(c);
}

// Characteristic cubic of the four-term recurrence at row n:
//   (-1 + a2/n) l^3 + (4 + a1/n) l^2 + (-5 + a0/n) l + (2 + a-1/n) = 0;
// n -> inf limit -(l-1)^2 (l-2), roots {1, 1, 2}.
inline std::vector<cplx> cubic_roots(const FourTermTable& T, int n) {
    if (n < 1) throw validation_error("n must be >= 1");
    const double dn = n;
    std::vector<cplx> c(4);
    c[3] = -1.0 + T.alpha[2 + 1] / dn;
    c[2] = 4.0 + T.alpha[1 + 1] / dn;
    c[1] = -5.0 + T.alpha[0 + 1] / dn;
    c[0] = 2.0 + T.alpha[-1 + 1] / dn;
    if (c[3] == cplx(0.0)) throw numeric_error("cubic degenerates at n = alpha2");
    return poly_roots(c);
}

inline int count_inside_unit_circle(const std::vector<cplx>& roots) {
    int k = 0;
    for (auto r : roots)
        if (std::abs(r) < 1.0) ++k;
    return k;
}

} // namespace sphfun
