#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <array>
#include <cmath>
#include <tuple>
#include <type_traits>
#include <utility>
#include <vector>

#include "recessive.hpp"
#include "recurrence.hpp"
#include "types.hpp"

namespace sphfun {

// ---------------------------------------------------------------------------
// Tail basis for the circle system.
//
// For n >= 2m+1 every admissible coefficient tail is a combination of two
// basis solutions of the backward recursion seeded at the truncation edge.
// Propagating two seeds naively makes the pair numerically collinear (the
// backward-dominant growth is ~ e^{2 sqrt(2 p n)}), so the carried 4x2 window
// is Gram-Schmidt orthonormalized after every step; each event contributes
// det R = r11 r22 > 0, whose log is accumulated so determinants built from
// the final basis can be related back to the seeded one.  Sparser cadences
// leave measurably more rounding in the determinant (the double-zero split
// widens ~30x at p = 2 with an every-8 schedule), so keep this per-step.
// ---------------------------------------------------------------------------

template <class C>
struct TailBasisT {
    // window[r][i] = value of basis solution i at n = 2m+4-r  (r = 0..3)
    std::array<std::array<C, 2>, 4> window{};
    typename C::value_type log_scale = 0; // sum of log det R over all orthonormalizations
    // When requested: values of the final-basis solutions for all
    // n in [2m+1, N+2], index n - n_min.
    std::vector<std::array<C, 2>> full;
    int n_min = 0;
};

using TailBasis = TailBasisT<cplx>;

namespace detail {

template <class C>
struct Mat2T {
    C a00{1.0}, a01{0.0}, a10{0.0}, a11{1.0};
};

template <class C>
inline Mat2T<C> mat2_mul(const Mat2T<C>& x, const Mat2T<C>& y) {
    Mat2T<C> r;
    r.a00 = x.a00 * y.a00 + x.a01 * y.a10;
    r.a01 = x.a00 * y.a01 + x.a01 * y.a11;
    r.a10 = x.a10 * y.a00 + x.a11 * y.a10;
    r.a11 = x.a10 * y.a01 + x.a11 * y.a11;
    return r;
}

template <class C>
inline C tweight(const FiveTermTable& T, double n, int d) {
    if constexpr (std::is_same_v<C, cplx>)
        return T.weight(n, d);
    else
        return C(T.weight_l(n, d));
}

} // namespace detail

template <class C>
inline TailBasisT<C> tail_basis_t(const FiveTermTable& T, int N, int m,
                                  bool keep_full = false) {
    using R = typename C::value_type;
    if (N < 2 * m + 8) throw validation_error("N must be at least 2m+8");
    TailBasisT<C> out;
    out.n_min = 2 * m + 1;

    // w[r][i]: r = 0 -> f_{n+2}, 1 -> f_{n+1}, 2 -> f_n, 3 -> f_{n-1}
    std::array<std::array<C, 2>, 4> w{};
    w[2][0] = 1.0; // f_N of basis 0
    w[3][1] = 1.0; // f_{N-1} of basis 1

    std::vector<std::array<C, 2>> hist; // raw values tagged by event count
    std::vector<int> tag;
    std::vector<detail::Mat2T<C>> rinv; // inverse of each event's R
    auto store = [&](const std::array<C, 2>& v) {
        if (keep_full) {
            hist.push_back(v);
            tag.push_back(int(rinv.size()));
        }
    };
    store(w[0]); // f_{N+2} = 0
    store(w[1]); // f_{N+1} = 0
    store(w[2]); // f_N
    store(w[3]); // f_{N-1}

    auto orthonormalize = [&]() {
        R n1 = 0;
        for (int r = 0; r < 4; ++r) n1 += std::norm(w[r][0]);
        n1 = std::sqrt(n1);
        if (n1 == 0) throw numeric_error("tail basis collapsed");
        for (int r = 0; r < 4; ++r) w[r][0] /= n1;
        C r12 = 0.0;
        for (int r = 0; r < 4; ++r) r12 += std::conj(w[r][0]) * w[r][1];
        for (int r = 0; r < 4; ++r) w[r][1] -= w[r][0] * r12;
        R n2 = 0;
        for (int r = 0; r < 4; ++r) n2 += std::norm(w[r][1]);
        n2 = std::sqrt(n2);
        if (n2 == 0) throw numeric_error("tail basis degenerated to rank one");
        for (int r = 0; r < 4; ++r) w[r][1] /= n2;
        out.log_scale += std::log(n1) + std::log(n2);
        if (keep_full) {
            detail::Mat2T<C> ri;
            ri.a00 = R(1) / n1;
            ri.a01 = -r12 / (n1 * n2);
            ri.a10 = 0.0;
            ri.a11 = R(1) / n2;
            rinv.push_back(ri);
        }
    };

    for (int n = N; n >= 2 * m + 3; --n) {
        const C piv = detail::tweight<C>(T, n, -2);
        std::array<C, 2> fresh;
        for (int i = 0; i < 2; ++i) {
            const C s = detail::tweight<C>(T, n, -1) * w[3][i] +
                        detail::tweight<C>(T, n, 0) * w[2][i] +
                        detail::tweight<C>(T, n, 1) * w[1][i] +
                        detail::tweight<C>(T, n, 2) * w[0][i];
            fresh[i] = -s / piv;
        }
        w[0] = w[1];
        w[1] = w[2];
        w[2] = w[3];
        w[3] = fresh;
        store(fresh);
        orthonormalize();
    }
    out.window[0] = w[0]; // f_{2m+4}
    out.window[1] = w[1]; // f_{2m+3}
    out.window[2] = w[2]; // f_{2m+2}
    out.window[3] = w[3]; // f_{2m+1}

    if (keep_full) {
        // Bring every stored value into the final basis: a value tagged after
        // e events is right-multiplied by R_{e+1}^{-1} ... R_E^{-1}.
        const int E = int(rinv.size());
        std::vector<detail::Mat2T<C>> suffix(size_t(E + 1));
        for (int e = E - 1; e >= 0; --e)
            suffix[size_t(e)] = detail::mat2_mul(rinv[size_t(e)], suffix[size_t(e + 1)]);
        out.full.assign(size_t(N + 2 - out.n_min + 1), {C(0.0), C(0.0)});
        // hist holds n = N+2, N+1, ..., 2m+1 in storage order
        for (size_t k = 0; k < hist.size(); ++k) {
            const int n = N + 2 - int(k);
            if (n < out.n_min) break;
            const detail::Mat2T<C>& S = suffix[size_t(tag[k])];
            const C v0 = hist[k][0], v1 = hist[k][1];
            out.full[size_t(n - out.n_min)] = {v0 * S.a00 + v1 * S.a10,
                                               v0 * S.a01 + v1 * S.a11};
        }
    }
    return out;
}

inline TailBasis tail_basis(const FiveTermTable& T, int N, int m,
                            bool keep_full = false) {
    return tail_basis_t<cplx>(T, N, m, keep_full);
}

// ---------------------------------------------------------------------------
// Reduced circle system.
//
// Unknowns x = (u_0..u_{2m} | K_1, K_2 | L_1, L_2): the leading set-1
// coefficients, the set-1 tail combination, and the set-2 tail combination
// (the gauge fixes f^{(2)}_0..f^{(2)}_{2m} = 0).  Rows are the mixed
// equations T_s = E^{(1)}_s + E^{(2)}_{2m-s}, s = -2..2m+2.  The pure rows
// and truncation rows of the full circle system are absorbed exactly into
// the tail bases, and their pivots are independent of lambda, so
// det(full) = const * exp(log_scale) * det(M).
// ---------------------------------------------------------------------------

struct CircleDet {
    cplx mantissa{};        // det of the reduced matrix in the final basis
    double log_scale = 0.0; // log of the positive factor split off by the bases
    double sigma_ratio = 0.0; // sigma_min/sigma_max of the column-normalized matrix
    double log_abs() const { return std::log(std::abs(mantissa)) + log_scale; }
};

namespace detail {

template <class C>
inline Eigen::Matrix<C, Eigen::Dynamic, Eigen::Dynamic>
reduced_matrix_t(int m, const FiveTermTable& T1, const FiveTermTable& T2,
                 const TailBasisT<C>& b1, const TailBasisT<C>& b2) {
    const int dim = 2 * m + 5;
    Eigen::Matrix<C, Eigen::Dynamic, Eigen::Dynamic> M(dim, dim);
    M.setZero();
    for (int r = 0; r < dim; ++r) {
        const int s = r - 2;
        for (int j = 0; j <= 2 * m; ++j) {
            const int d = j - s;
            if (d >= -2 && d <= 2) M(r, j) = tweight<C>(T1, s, d);
        }
        for (int d = -2; d <= 2; ++d) {
            const int jj = s + d;
            if (jj >= 2 * m + 1 && jj <= 2 * m + 4)
                for (int i = 0; i < 2; ++i)
                    M(r, 2 * m + 1 + i) += tweight<C>(T1, s, d) * b1.window[size_t(2 * m + 4 - jj)][size_t(i)];
            const int jj2 = 2 * m - s + d;
            if (jj2 >= 2 * m + 1 && jj2 <= 2 * m + 4)
                for (int i = 0; i < 2; ++i)
                    M(r, 2 * m + 3 + i) += tweight<C>(T2, 2 * m - s, d) * b2.window[size_t(2 * m + 4 - jj2)][size_t(i)];
        }
    }
    return M;
}

inline Eigen::MatrixXcd reduced_matrix(int m, const FiveTermTable& T1,
                                       const FiveTermTable& T2,
                                       const TailBasis& b1, const TailBasis& b2) {
    return reduced_matrix_t<cplx>(m, T1, T2, b1, b2);
}

} // namespace detail

inline Eigen::MatrixXcd circle_matrix(int m, double p, double a, double lambda,
                                      int N, double* log_scale_out = nullptr) {
    const FiveTermTable T1 = five_term_table(m, p, a, lambda, SetId::f_set);
    const FiveTermTable T2 = five_term_table(m, p, a, lambda, SetId::g_set);
    const TailBasis b1 = tail_basis(T1, N, m);
    const TailBasis b2 = tail_basis(T2, N, m);
    if (log_scale_out) *log_scale_out = b1.log_scale + b2.log_scale;
    return detail::reduced_matrix(m, T1, T2, b1, b2);
}

// Extended precision throughout (weights, recursions, orthonormalizations,
// LU): in plain double the reduced determinant carries enough recursion
// rounding that the vertex of the funnel jitters by ~1e-9 at p = 2 once
// N >= 768, which blocks the N-doubling convergence check.  The 80-bit path
// leaves jitter below ~1e-12; the result is rounded to double on return.
inline CircleDet circle_determinant(int m, double p, double a, double lambda, int N) {
    using cplxl = std::complex<long double>;
    const FiveTermTable T1 = five_term_table(m, p, a, lambda, SetId::f_set);
    const FiveTermTable T2 = five_term_table(m, p, a, lambda, SetId::g_set);
    const TailBasisT<cplxl> b1 = tail_basis_t<cplxl>(T1, N, m);
    const TailBasisT<cplxl> b2 = tail_basis_t<cplxl>(T2, N, m);
    const auto Ml = detail::reduced_matrix_t<cplxl>(m, T1, T2, b1, b2);

    CircleDet out;
    out.log_scale = double(b1.log_scale + b2.log_scale);
    using MatL = Eigen::Matrix<cplxl, Eigen::Dynamic, Eigen::Dynamic>;
    const cplxl det = Eigen::PartialPivLU<MatL>(Ml).determinant();
    out.mantissa = cplx(double(det.real()), double(det.imag()));

    Eigen::MatrixXcd Mn = Ml.cast<cplx>();
    for (int j = 0; j < Mn.cols(); ++j) {
        const double nj = Mn.col(j).norm();
        if (nj > 0.0) Mn.col(j) /= nj;
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(Mn);
    const auto& sv = svd.singularValues();
    out.sigma_ratio = sv(sv.size() - 1) / sv(0);
    return out;
}

// Rank-deficiency measure of the reduced system: dips to a quadratic minimum
// crossing zero (through rounding) exactly at the eigenvalues.
inline double match_determinant(int m, double p, double a, double lambda, int N) {
    return circle_determinant(m, p, a, lambda, N).sigma_ratio;
}

// Null direction of the reduced matrix at (near) an eigenvalue.
struct ReducedNull {
    Eigen::VectorXcd x; // (u_0..u_{2m}, K1, K2, L1, L2)
    double sigma_min = 0.0;
    double sigma_max = 0.0;
};

inline ReducedNull reduced_null(const Eigen::MatrixXcd& M) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    ReducedNull out;
    out.sigma_min = sv(sv.size() - 1);
    out.sigma_max = sv(0);
    out.x = svd.matrixV().col(M.cols() - 1);
    return out;
}

// Full coefficient vectors of both sets at an eigenvalue, from the reduced
// null direction and the reconstructed tails.  Normalized so the largest
// coefficient magnitude over both sets is 1; the divisor is reported.
struct CircleCoefficients {
    std::vector<cplx> f1; // set 1 (+a), indices 0..N+2
    std::vector<cplx> f2; // set 2 (-a), indices 0..N+2
    double scale = 1.0;
    double sigma_ratio = 0.0;
    double reality_defect = 0.0; // residual of the reality pairing, see below
};

// Extended precision like the determinant: coefficient noise is amplified by
// the e^{+pS} prefactor when the series is evaluated deep in the tail, so the
// double-SVD null direction is polished by inverse iteration with the 80-bit
// reduced matrix and the tails are reconstructed from 80-bit bases.
inline CircleCoefficients circle_coefficients(int m, double p, double a,
                                              double lambda, int N) {
    using cplxl = std::complex<long double>;
    using VecL = Eigen::Matrix<cplxl, Eigen::Dynamic, 1>;
    using MatL = Eigen::Matrix<cplxl, Eigen::Dynamic, Eigen::Dynamic>;
    const FiveTermTable T1 = five_term_table(m, p, a, lambda, SetId::f_set);
    const FiveTermTable T2 = five_term_table(m, p, a, lambda, SetId::g_set);
    const TailBasisT<cplxl> b1 = tail_basis_t<cplxl>(T1, N, m, true);
    const TailBasisT<cplxl> b2 = tail_basis_t<cplxl>(T2, N, m, true);
    const MatL Ml = detail::reduced_matrix_t<cplxl>(m, T1, T2, b1, b2);

    const ReducedNull nu = reduced_null(Ml.cast<cplx>());
    VecL x = nu.x.cast<cplxl>();
    {
        const Eigen::PartialPivLU<MatL> lu(Ml);
        for (int it = 0; it < 2; ++it) {
            VecL y = lu.solve(x);
            const long double ny = std::sqrt(y.squaredNorm());
            if (!(ny > 0.0L) || !std::isfinite(double(ny))) break;
            x = y / ny;
        }
    }

    CircleCoefficients out;
    out.sigma_ratio = nu.sigma_min / nu.sigma_max;
    std::vector<cplxl> g1(size_t(N + 3), cplxl(0.0L));
    std::vector<cplxl> g2(size_t(N + 3), cplxl(0.0L));
    for (int j = 0; j <= 2 * m; ++j) g1[size_t(j)] = x(j);
    const cplxl K1 = x(2 * m + 1), K2 = x(2 * m + 2);
    const cplxl L1 = x(2 * m + 3), L2 = x(2 * m + 4);
    for (int n = 2 * m + 1; n <= N + 2; ++n) {
        const auto& v1 = b1.full[size_t(n - b1.n_min)];
        const auto& v2 = b2.full[size_t(n - b2.n_min)];
        g1[size_t(n)] = K1 * v1[0] + K2 * v1[1];
        g2[size_t(n)] = L1 * v2[0] + L2 * v2[1];
    }
    // Reality convention.  On |w| = 1 the evaluated series is real iff the
    // monomial coefficients are conjugate-symmetric: with the low band of
    // set 2 gauged away that means f1_{2m-n} = conj(f1_n) for n <= 2m and
    // f2_n = conj(f1_n) in the tails.  The null vector carries an arbitrary
    // phase; J below is the anti-linear pairing map, x is rotated so Jx = x.
    auto pair_image = [&](const std::vector<cplxl>& a1, const std::vector<cplxl>& a2) {
        std::vector<cplxl> j1(a1.size(), cplxl(0.0L)), j2(a2.size(), cplxl(0.0L));
        for (int n = 0; n <= 2 * m; ++n) j1[size_t(n)] = std::conj(a1[size_t(2 * m - n)]);
        for (int n = 2 * m + 1; n <= N + 2; ++n) {
            j1[size_t(n)] = std::conj(a2[size_t(n)]);
            j2[size_t(n)] = std::conj(a1[size_t(n)]);
        }
        return std::make_pair(j1, j2);
    };
    auto [j1, j2] = pair_image(g1, g2);
    cplxl inner = 0.0L;
    long double norm2 = 0.0L;
    for (size_t i = 0; i < g1.size(); ++i) {
        inner += std::conj(g1[i]) * j1[i] + std::conj(g2[i]) * j2[i];
        norm2 += std::norm(g1[i]) + std::norm(g2[i]);
    }
    if (std::abs(inner) > 0.0L) {
        const cplxl rot = std::exp(cplxl(0.0L, 0.5L * std::arg(inner / norm2)));
        for (cplxl& v : g1) v *= rot;
        for (cplxl& v : g2) v *= rot;
    }
    std::tie(j1, j2) = pair_image(g1, g2);
    long double defect2 = 0.0L;
    for (size_t i = 0; i < g1.size(); ++i)
        defect2 += std::norm(j1[i] - g1[i]) + std::norm(j2[i] - g2[i]);
    out.reality_defect = double(std::sqrt(defect2 / norm2));

    long double mx = 0.0L;
    for (const cplxl& v : g1) mx = std::max(mx, std::abs(v));
    for (const cplxl& v : g2) mx = std::max(mx, std::abs(v));
    if (mx == 0.0L) mx = 1.0L;
    out.f1.resize(g1.size());
    out.f2.resize(g2.size());
    for (size_t i = 0; i < g1.size(); ++i) {
        out.f1[i] = cplx(double(g1[i].real() / mx), double(g1[i].imag() / mx));
        out.f2[i] = cplx(double(g2[i].real() / mx), double(g2[i].imag() / mx));
    }
    out.scale = double(mx);
    return out;
}

// Per-branch coefficient sets for the evaluated representation.  The circle
// sets overlap on monomial powers |j| <= m; splitting the low band evenly
// between a set and its implied conjugate partner reproduces the combined
// function as P 2Re sum on each branch.  Right branch: set 1 with the low
// band halved.  Left branch: set 2 tails plus the conjugated halved low band.
inline void branch_sets(const CircleCoefficients& cc, int m,
                        std::vector<cplx>& right, std::vector<cplx>& left) {
    right = cc.f1;
    left = cc.f2;
    for (int n = 0; n <= 2 * m; ++n) {
        right[size_t(n)] = 0.5 * cc.f1[size_t(n)];
        left[size_t(n)] = 0.5 * std::conj(cc.f1[size_t(n)]);
    }
}

// ---------------------------------------------------------------------------
// Literal two-sided matcher (diagnostic): regularity residual rows of both
// arcs plus value/derivative continuity at t = 0, as a real system on
// (Re K, Im K, Re L, Im L).  Its smallest singular value does NOT vanish at
// the eigenvalues; it is kept as a structure probe of the sided cascades.
// ---------------------------------------------------------------------------
inline double match_system_sigma(int m, double p, double a, double lambda, int N) {
    const auto R = side_cascade(m, p, a, lambda, N, Branch::right);
    const auto L = side_cascade(m, p, a, lambda, N, Branch::left);
    const double sig = a / (2.0 * p);

    // S(0) and S'(0) of a coefficient vector: w(0) = -1, w'(0) = -2i.
    auto arc0 = [&](const std::vector<cplx>& f, double scale) {
        cplx S = 0.0, Sp = 0.0;
        for (size_t n = 0; n < f.size(); ++n) {
            const double sgn = ((int(n) - m) % 2 == 0) ? 1.0 : -1.0;
            S += f[n] * sgn;
            Sp += f[n] * (double(n) - m) * sgn;
        }
        Sp *= cplx(0.0, 2.0);
        return std::array<cplx, 2>{S / scale, Sp / scale};
    };

    std::vector<std::array<double, 8>> rows;
    auto crow = [&](std::array<cplx, 2> cr, std::array<cplx, 2> cl) {
        std::array<double, 8> re{}, im{};
        for (int i = 0; i < 2; ++i) {
            re[2 * i] = cr[size_t(i)].real();
            re[2 * i + 1] = -cr[size_t(i)].imag();
            im[2 * i] = cr[size_t(i)].imag();
            im[2 * i + 1] = cr[size_t(i)].real();
            re[4 + 2 * i] = cl[size_t(i)].real();
            re[4 + 2 * i + 1] = -cl[size_t(i)].imag();
            im[4 + 2 * i] = cl[size_t(i)].imag();
            im[4 + 2 * i + 1] = cl[size_t(i)].real();
        }
        rows.push_back(re);
        rows.push_back(im);
    };
    const std::array<cplx, 2> zz{cplx(0.0), cplx(0.0)};
    crow(std::array<cplx, 2>{R[0].r1, R[1].r1}, zz);
    crow(std::array<cplx, 2>{R[0].r2, R[1].r2}, zz);
    crow(zz, std::array<cplx, 2>{L[0].r1, L[1].r1});
    crow(zz, std::array<cplx, 2>{L[0].r2, L[1].r2});

    // F = 2 Re(sum_i K_i S_i): row on (Re K_i, Im K_i) is (2 Re S_i, -2 Im S_i).
    std::array<double, 8> fr{}, fd{};
    for (int i = 0; i < 2; ++i) {
        const auto v = arc0(R[size_t(i)].f, R[size_t(i)].scale);
        const cplx Fv = v[0];
        const cplx Dv = 2.0 * sig * v[0] + v[1];
        fr[2 * i] = 2.0 * Fv.real();
        fr[2 * i + 1] = -2.0 * Fv.imag();
        fd[2 * i] = 2.0 * Dv.real();
        fd[2 * i + 1] = -2.0 * Dv.imag();
    }
    for (int i = 0; i < 2; ++i) {
        const auto v = arc0(L[size_t(i)].f, L[size_t(i)].scale);
        const cplx Fv = v[0];
        const cplx Dv = -2.0 * sig * v[0] + v[1];
        fr[4 + 2 * i] = -2.0 * Fv.real();
        fr[4 + 2 * i + 1] = 2.0 * Fv.imag();
        fd[4 + 2 * i] = -2.0 * Dv.real();
        fd[4 + 2 * i + 1] = 2.0 * Dv.imag();
    }
    rows.push_back(fr);
    rows.push_back(fd);

    Eigen::MatrixXd A(int(rows.size()), 8);
    for (int r = 0; r < A.rows(); ++r) {
        double nr = 0.0;
        for (int c = 0; c < 8; ++c) nr += rows[size_t(r)][size_t(c)] * rows[size_t(r)][size_t(c)];
        nr = std::sqrt(nr);
        if (nr == 0.0) nr = 1.0;
        for (int c = 0; c < 8; ++c) A(r, c) = rows[size_t(r)][size_t(c)] / nr;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
    const auto& sv = svd.singularValues();
    return sv(sv.size() - 1) / sv(0);
}

} // namespace sphfun
