#pragma once

#include <cmath>

#include "types.hpp"

namespace sphfun {

// t = xi / (sqrt(xi^2+1) + 1); strictly increasing, odd, (-inf,inf) -> (-1,1).
inline double xi_to_t(double xi) {
    return xi / (std::sqrt(xi * xi + 1.0) + 1.0);
}

// Inverse: xi = 2t / (1 - t^2).
inline double t_to_xi(double t) {
    if (!(std::fabs(t) < 1.0)) throw validation_error("t must lie in (-1,1)");
    return 2.0 * t / (1.0 - t * t);
}

// Continuous phase of w = (t-i)/(t+i) on the physical branch:
// theta = 2 atan(t) - pi, so theta(-1,0,1) = -3pi/2, -pi, -pi/2.
inline double monomial_phase(double t) {
    return 2.0 * std::atan(t) - M_PI;
}

// X = prefactor * F with prefactor = e^{-p S}/S, S = sqrt(xi^2+1).
inline double prefactor(double xi, double p) {
    const double S = std::sqrt(xi * xi + 1.0);
    return std::exp(-p * S) / S;
}


// ((1+t)/(1-t))^{a/2p} on the right branch, reciprocal exponent on the left.
// Evaluated in log space: the exponent a/2p can be large for small p.
inline double asym_factor(double t, double a, double p, Branch branch) {
    if (!(std::fabs(t) < 1.0)) throw validation_error("t must lie in (-1,1)");
    const double sig = a / (2.0 * p);
    const double lr = std::log1p(t) - std::log1p(-t);
    return std::exp((branch == Branch::right ? sig : -sig) * lr);
}

} // namespace sphfun
