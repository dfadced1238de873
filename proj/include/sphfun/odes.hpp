#pragma once

#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <vector>

#include "types.hpp"

namespace sphfun {

// State carried by all axis integrations: y = (X, Q) with Q = (xi^2+1) X'.
// Carrying Q instead of X' keeps the equation polynomial in xi and makes the
// flux continuous through xi = 0 trivially.
using State2 = std::array<double, 2>;
// Augmented state (X, Q, Z) with Z' = X^2, for exact L2 quadrature.
using State3 = std::array<double, 3>;

// Whole-axis equation: X' = Q/(xi^2+1), Q' = bracket(xi) X,
// bracket = lambda + p^2 (xi^2+1) - a xi - m^2/(xi^2+1).
struct AxisEquation {
    double lambda = 0.0;
    int m = 0;
    double p = 1.0;
    double a = 0.0;

    double bracket(double xi) const {
        const double s2 = xi * xi + 1.0;
        return lambda + p * p * s2 - a * xi - double(m) * double(m) / s2;
    }
    void operator()(const State2& y, State2& dy, double xi) const {
        const double s2 = xi * xi + 1.0;
        dy[0] = y[1] / s2;
        dy[1] = bracket(xi) * y[0];
    }
    void operator()(const State3& y, State3& dy, double xi) const {
        const double s2 = xi * xi + 1.0;
        dy[0] = y[1] / s2;
        dy[1] = bracket(xi) * y[0];
        dy[2] = y[0] * y[0];
    }
};

// Ring equation in the binding variable s = |E| R^2 / 2 (> 0 for a bound
// level): bracket = lambda + s (xi^2+1) - U0 xi^2 - m^2/(xi^2+1); the U0 term
// is present only on the interior segment |xi| < xi0.
struct RingEquation {
    double lambda = 0.0;
    int m = 0;
    double s = 1.0;
    double U0 = 0.0; // set to 0 for the exterior equation

    double bracket(double xi) const {
        const double s2 = xi * xi + 1.0;
        return lambda + s * s2 - U0 * xi * xi - double(m) * double(m) / s2;
    }
    void operator()(const State2& y, State2& dy, double xi) const {
        const double s2 = xi * xi + 1.0;
        dy[0] = y[1] / s2;
        dy[1] = bracket(xi) * y[0];
    }
};

namespace detail {

inline void check_range(double xi) {
    if (!(std::abs(xi) <= 200.0))
        throw validation_error("xi out of range: |xi| must be <= 200");
}

template <class Sys, class St>
void advance(const Sys& sys, St& y, double from, double to, double tol) {
    namespace od = boost::numeric::odeint;
    if (from == to) return;
    auto stepper = od::make_controlled(tol * 1e-2, tol * 1e-2,
                                       od::runge_kutta_fehlberg78<St>());
    const double dt = (to > from ? 1.0 : -1.0) * 1e-3;
    od::integrate_adaptive(stepper, sys, y, from, to, dt);
}

} // namespace detail

// Integrate y from xi_from to xi_to (either direction).
template <class Sys, class St>
St integrate_to(const Sys& sys, St y, double xi_from, double xi_to,
                double tol = 1e-12) {
    detail::check_range(xi_from);
    detail::check_range(xi_to);
    detail::advance(sys, y, xi_from, xi_to, tol);
    return y;
}

// Integrate from xi_start and record the state at each point of `pts`.
// `pts` must be monotone in the direction away from xi_start; every recorded
// state is an exact integration endpoint (no dense-output interpolation).
template <class Sys, class St>
std::vector<St> sample_path(const Sys& sys, St y, double xi_start,
                            const std::vector<double>& pts,
                            double tol = 1e-12) {
    detail::check_range(xi_start);
    std::vector<St> out;
    out.reserve(pts.size());
    double cur = xi_start;
    for (double xi : pts) {
        detail::check_range(xi);
        if ((xi - cur) * (pts.back() - xi_start) < 0.0 && xi != cur)
            throw validation_error("sample points must be monotone from the start point");
        detail::advance(sys, y, cur, xi, tol);
        cur = xi;
        out.push_back(y);
    }
    return out;
}

} // namespace sphfun
