#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "odes.hpp"
#include "powersolver.hpp"
#include "series_eval.hpp"
#include "types.hpp"

namespace sphfun {

// ---------------------------------------------------------------------------
// Finite-depth spheroidal ring: interior equation (with the -U0 xi^2 well
// term) integrated out from xi = 0 in parity classes, exterior equation
// (U0 = 0, which is the whole-axis equation with p = sqrt(s), a = 0)
// solved with decay at infinity, the two matched smoothly at xi0.
// s = |E| R^2 / 2 > 0 is the binding variable; lambda is an input.
// ---------------------------------------------------------------------------

struct RingBoundary {
    double x = 0.0;
    double q = 0.0; // (xi^2+1) X'
    double dlog() const {
        if (x == 0.0) throw numeric_error("log-derivative at a node");
        return q / x;
    }
};

inline double ring_s(const RingConfig& rc, double E) {
    const double s = std::abs(E) * rc.R * rc.R / 2.0;
    // the exterior start max(25/sqrt(s), 4 xi0) must stay inside the
    // integrator's range guard
    if (!(s >= 0.016))
        throw validation_error("binding too weak: |E| R^2/2 must be >= 0.016");
    return s;
}

inline RingBoundary ring_interior_state(const RingConfig& rc, double E,
                                        Parity parity) {
    const double s = ring_s(rc, E);
    const RingEquation eq{rc.lambda, rc.m, s, rc.U0};
    State2 y = (parity == Parity::even) ? State2{1.0, 0.0} : State2{0.0, 1.0};
    y = integrate_to(eq, y, 0.0, rc.xi0);
    return {y[0], y[1]};
}

inline double ring_exterior_start(double s, double xi0) {
    return std::min(std::max(25.0 / std::sqrt(s), 4.0 * xi0), 200.0);
}

// Decaying exterior solution by inward integration from L (start magnitude 1,
// direction from the e^{-sqrt(s) xi} xi^{-1} asymptotics).
inline RingBoundary ring_exterior_inward(const RingConfig& rc, double E,
                                         double start_mult = 1.0) {
    const double s = ring_s(rc, E);
    const double ps = std::sqrt(s);
    const double L = std::min(ring_exterior_start(s, rc.xi0) * start_mult, 200.0);
    const RingEquation eq{rc.lambda, rc.m, s, 0.0};
    State2 y{1.0, (L * L + 1.0) * (-ps - 1.0 / L)};
    y = integrate_to(eq, y, L, rc.xi0);
    return {y[0], y[1]};
}

// ---------------------------------------------------------------------------
// Series route for the exterior solution: the a = 0 expansion with effective
// parameter sqrt(s), restricted to the exterior interval.  At a generic
// lambda the decaying half-line solution has both parity components, so
//   X(xi) = e^{-ps S}/S (Fe(u) + t Fo(u)),   u = (1+t^2)/2,
// with each component's high coefficients taken from the backward (recessive)
// recursion of its table and the low bands completed by a least-squares fit
// against a sampled trajectory on the exterior interval -- same completion as
// the whole-axis power representation, which cannot come out of the
// recurrence alone (see powersolver).  The fit trajectory starts at 1.5x the
// exterior start so the agreement check in ring_exterior_state compares two
// distinct integrations.
// ---------------------------------------------------------------------------

struct RingExteriorSeries {
    int m = 0;
    double ps = 1.0; // sqrt(s)
    double lambda = 0.0;
    double xi_lo = 0.0, xi_hi = 0.0; // fitted interval
    std::vector<double> fe, fo;
};

inline PointVal eval_ring_exterior(const RingExteriorSeries& rs, double xi) {
    const double S = std::sqrt(xi * xi + 1.0);
    const double t = xi / (S + 1.0);
    const double u = 0.5 * (1.0 + t * t);
    double Fe = 0.0, dFe = 0.0, Fo = 0.0, dFo = 0.0;
    for (size_t i = rs.fe.size(); i-- > 0;) {
        dFe = dFe * u + Fe;
        Fe = Fe * u + rs.fe[i];
    }
    for (size_t i = rs.fo.size(); i-- > 0;) {
        dFo = dFo * u + Fo;
        Fo = Fo * u + rs.fo[i];
    }
    const double F = Fe + t * Fo;
    const double dFdt = t * dFe + Fo + t * t * dFo; // du/dt = t
    const double G = std::exp(-rs.ps * S) / S;
    const double dG = -std::exp(-rs.ps * S) * xi * (rs.ps * S + 1.0) / (S * S * S);
    PointVal out;
    out.x = G * F;
    out.dx = dG * F + G * dFdt / (S * (S + 1.0));
    return out;
}

inline RingExteriorSeries ring_exterior_series(int m, double s, double lambda,
                                               double xi0, int N = 400) {
    if (!(s > 0.0)) throw validation_error("s must be positive");
    const double ps = std::sqrt(s);
    RingExteriorSeries rs;
    rs.m = m;
    rs.ps = ps;
    rs.lambda = lambda;

    std::vector<double> he = power_bottom(m, ps, lambda, Parity::even, N).f;
    std::vector<double> ho = power_bottom(m, ps, lambda, Parity::odd, N).f;
    he.resize(size_t(N + 1));
    ho.resize(size_t(N + 1));
    auto normalize = [](std::vector<double>& v) {
        double mx = 0.0;
        for (double x : v) mx = std::max(mx, std::abs(x));
        if (mx > 0.0)
            for (double& x : v) x /= mx;
    };
    normalize(he);
    normalize(ho);

    // exterior interval and reference trajectory; the start is 1.5x the one
    // ring_exterior_inward uses so the two routes integrate distinct paths
    rs.xi_lo = std::max(0.02, 0.85 * xi0);
    rs.xi_hi = std::min(std::max(9.0 * xi0, std::max(12.0 / ps, 10.0) + 2.0), 150.0);
    const double L =
        std::min(1.5 * std::max(25.0 / ps, 1.25 * rs.xi_hi), 200.0);
    const RingEquation eq{lambda, m, s, 0.0};
    const int M = 420;
    std::vector<double> xi(size_t(M), 0.0);
    for (int i = 0; i < M; ++i)
        xi[size_t(i)] = rs.xi_hi - (rs.xi_hi - rs.xi_lo) * double(i) / double(M - 1);
    State2 y0{1.0, (L * L + 1.0) * (-ps - 1.0 / L)};
    const std::vector<State2> path = sample_path(eq, y0, L, xi);

    // Unknowns: one amplitude per parity tail (n > deg, fixed shape from the
    // recursion) plus free low bands (n <= deg).  The relative even/odd
    // amplitude is not known a priori at generic lambda, so it must be fitted
    // along with the completion.
    const int deg = std::min(56, N - 8);
    Eigen::MatrixXd A(M, 2 * (deg + 1) + 2);
    Eigen::VectorXd b(M);
    for (int i = 0; i < M; ++i) {
        const double x = xi[size_t(i)];
        const double S = std::sqrt(x * x + 1.0);
        const double t = x / (S + 1.0);
        const double u = 0.5 * (1.0 + t * t);
        const double we = std::exp(-ps * S) / S;
        const double wo = we * t;
        double Te = 0.0, To = 0.0; // tail-only Horner, n in (deg, N]
        for (int n = N; n > deg; --n) {
            Te = (Te + he[size_t(n)]) * u;
            To = (To + ho[size_t(n)]) * u;
        }
        double updeg = 1.0; // u^deg
        for (int j = 0; j < deg; ++j) updeg *= u;
        A(i, 0) = we * Te * updeg;
        A(i, 1) = wo * To * updeg;
        double pw = 1.0;
        for (int j = 0; j <= deg; ++j) {
            A(i, 2 + j) = we * pw;
            A(i, 2 + deg + 1 + j) = wo * pw;
            pw *= u;
        }
        b(i) = path[size_t(i)][0];
    }
    const Eigen::VectorXd g = A.colPivHouseholderQr().solve(b);
    rs.fe.assign(size_t(N + 1), 0.0);
    rs.fo.assign(size_t(N + 1), 0.0);
    for (int n = deg + 1; n <= N; ++n) {
        rs.fe[size_t(n)] = g(0) * he[size_t(n)];
        rs.fo[size_t(n)] = g(1) * ho[size_t(n)];
    }
    for (int j = 0; j <= deg; ++j) {
        rs.fe[size_t(j)] = g(2 + j);
        rs.fo[size_t(j)] = g(2 + deg + 1 + j);
    }
    double mx = 0.0;
    for (double c : rs.fe) mx = std::max(mx, std::abs(c));
    for (double c : rs.fo) mx = std::max(mx, std::abs(c));
    if (mx > 0.0) {
        for (double& c : rs.fe) c /= mx;
        for (double& c : rs.fo) c /= mx;
    }
    return rs;
}

// Exterior boundary state with the dual-route consistency check: the series
// value/derivative at xi0 must agree with inward integration in
// log-derivative, else the disagreement is flagged instead of silently
// picking a side.
inline RingBoundary ring_exterior_state(const RingConfig& rc, double E) {
    const double s = ring_s(rc, E);
    const RingBoundary bi = ring_exterior_inward(rc, E);
    const RingExteriorSeries rs = ring_exterior_series(rc.m, s, rc.lambda, rc.xi0);
    const PointVal pv = eval_ring_exterior(rs, rc.xi0);
    const double ld_int = bi.dlog();
    const double ld_ser = (rc.xi0 * rc.xi0 + 1.0) * pv.dx / pv.x;
    if (!(std::abs(ld_int - ld_ser) <= 1e-8 * (1.0 + std::abs(ld_int))))
        throw numeric_error("exterior series and integration log-derivatives disagree: " +
                            std::to_string(ld_ser) + " vs " + std::to_string(ld_int));
    return bi;
}

// ---------------------------------------------------------------------------
// Spectrum: zeros of the scaled Wronskian mismatch
//   W(E) = X_int X'_ext - X'_int X_ext  at xi0,
// per parity class, over the configured E range.
// ---------------------------------------------------------------------------

namespace detail {

inline double ring_mismatch(const RingConfig& rc, double E, Parity parity) {
    const RingBoundary bi = ring_interior_state(rc, E, parity);
    const RingBoundary be = ring_exterior_inward(rc, E);
    const double s2 = rc.xi0 * rc.xi0 + 1.0;
    const double w = bi.x * (be.q / s2) - (bi.q / s2) * be.x;
    const double sc = std::abs(bi.x * (be.q / s2)) + std::abs((bi.q / s2) * be.x);
    return (sc > 0.0) ? w / sc : 0.0;
}

} // namespace detail

inline std::vector<RingLevel> ring_spectrum(const RingConfig& rc) {
    validate(rc);
    const double s_floor = 2.0 * 0.016 / (rc.R * rc.R); // |E| giving s = 0.016
    std::vector<RingLevel> out;
    for (Parity parity : {Parity::even, Parity::odd}) {
        const int nscan = 400;
        double prevE = 0.0, prevW = 0.0;
        bool havePrev = false;
        for (int i = 0; i <= nscan; ++i) {
            const double E = rc.E_min + (rc.E_max - rc.E_min) * double(i) / nscan;
            if (std::abs(E) * rc.R * rc.R / 2.0 < 0.016 ||
                std::abs(E) <= s_floor * 1e-12) {
                havePrev = false;
                continue;
            }
            const double W = detail::ring_mismatch(rc, E, parity);
            if (havePrev && prevW * W < 0.0) {
                double lo = prevE, hi = E, flo = prevW;
                for (int it = 0; it < 200 && hi - lo > rc.tol; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    const double fm = detail::ring_mismatch(rc, mid, parity);
                    if (flo * fm <= 0.0) {
                        hi = mid;
                    } else {
                        lo = mid;
                        flo = fm;
                    }
                }
                const double Estar = 0.5 * (lo + hi);
                RingLevel lv;
                lv.E = Estar;
                lv.s = ring_s(rc, Estar);
                lv.parity = parity;
                lv.mismatch = std::abs(detail::ring_mismatch(rc, Estar, parity));

                // post-checks: dual-route exterior agreement, smooth binding,
                // and exterior decay at 4 xi0 and 8 xi0
                const RingBoundary bi = ring_interior_state(rc, Estar, parity);
                const RingBoundary be = ring_exterior_state(rc, Estar);
                const double C2 = (be.x != 0.0) ? bi.x / be.x : 0.0;
                const double ps = std::sqrt(lv.s);
                const double Ld = std::min(std::max(25.0 / ps, 9.0 * rc.xi0), 200.0);
                const RingEquation ext{rc.lambda, rc.m, lv.s, 0.0};
                {
                    State2 y{1.0, (Ld * Ld + 1.0) * (-ps - 1.0 / Ld)};
                    std::vector<double> pts{8.0 * rc.xi0, 4.0 * rc.xi0, rc.xi0};
                    pts.erase(std::remove_if(pts.begin(), pts.end(),
                                             [&](double v) { return v >= Ld; }),
                              pts.end());
                    const auto st = sample_path(ext, y, Ld, pts);
                    for (size_t j = 1; j < st.size(); ++j)
                        if (!(std::abs(st[j - 1][0]) < std::abs(st[j][0])))
                            throw numeric_error("exterior solution fails to decay outward");
                }

                // boundary grids, exterior rescaled for continuity
                const int ng = 101;
                {
                    const RingEquation inner{rc.lambda, rc.m, lv.s, rc.U0};
                    std::vector<double> pts(size_t(ng), 0.0);
                    for (int j = 0; j < ng; ++j)
                        pts[size_t(j)] = rc.xi0 * double(j) / (ng - 1);
                    State2 y = (parity == Parity::even) ? State2{1.0, 0.0}
                                                        : State2{0.0, 1.0};
                    const auto st = sample_path(inner, y, 0.0, pts);
                    lv.interior.xi = pts;
                    for (int j = 0; j < ng; ++j) {
                        lv.interior.x.push_back(st[size_t(j)][0]);
                        lv.interior.dx.push_back(st[size_t(j)][1] /
                                                 (pts[size_t(j)] * pts[size_t(j)] + 1.0));
                    }
                }
                {
                    std::vector<double> pts(size_t(ng), 0.0);
                    const double hi8 = std::min(8.0 * rc.xi0, 0.99 * Ld);
                    for (int j = 0; j < ng; ++j)
                        pts[size_t(j)] = hi8 - (hi8 - rc.xi0) * double(j) / (ng - 1);
                    State2 y{1.0, (Ld * Ld + 1.0) * (-ps - 1.0 / Ld)};
                    auto st = sample_path(ext, y, Ld, pts);
                    std::reverse(pts.begin(), pts.end());
                    std::reverse(st.begin(), st.end());
                    lv.exterior.xi = pts;
                    for (int j = 0; j < ng; ++j) {
                        lv.exterior.x.push_back(C2 * st[size_t(j)][0]);
                        lv.exterior.dx.push_back(C2 * st[size_t(j)][1] /
                                                 (pts[size_t(j)] * pts[size_t(j)] + 1.0));
                    }
                }
                out.push_back(std::move(lv));
            }
            prevE = E;
            prevW = W;
            havePrev = true;
        }
    }
    std::sort(out.begin(), out.end(),
              [](const RingLevel& x, const RingLevel& y) { return x.E < y.E; });
    return out;
}

} // namespace sphfun
