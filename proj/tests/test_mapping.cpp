#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "sphfun/mapping.hpp"

using namespace sphfun;

TEST_CASE("xi_to_t exact values") {
    CHECK(xi_to_t(0.0) == 0.0);
    // sqrt((3/4)^2 + 1) = 5/4, so t = (3/4)/(9/4) = 1/3
    CHECK(xi_to_t(0.75) == Catch::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(xi_to_t(-0.75) == Catch::Approx(-1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("xi_to_t is odd, strictly increasing, and tends to 1") {
    double prev = -1.0;
    for (double xi = -50.0; xi <= 50.0; xi += 0.37) {
        const double t = xi_to_t(xi);
        CHECK(t > prev);
        CHECK(std::abs(t) < 1.0);
        CHECK(xi_to_t(-xi) == Catch::Approx(-t).margin(1e-16));
        prev = t;
    }
    CHECK(xi_to_t(1e8) > 1.0 - 1e-7);
    CHECK(xi_to_t(1e8) < 1.0);
}

TEST_CASE("t_to_xi inverts the map") {
    CHECK(t_to_xi(1.0 / 3.0) == Catch::Approx(0.75).epsilon(1e-15));
    CHECK(t_to_xi(0.0) == 0.0);
    for (double t = -0.999; t < 1.0; t += 0.0501) {
        CHECK(xi_to_t(t_to_xi(t)) == Catch::Approx(t).margin(1e-12));
    }
    CHECK_THROWS_AS(t_to_xi(1.0), validation_error);
    CHECK_THROWS_AS(t_to_xi(-1.2), validation_error);
}

TEST_CASE("monomial phase (t-i)/(t+i) stays unimodular") {
    for (double t : {-0.9, -0.3, 0.0, 0.4, 0.8}) {
        const cplx w = (cplx(t, -1.0)) / (cplx(t, 1.0));
        CHECK(std::abs(w) == Catch::Approx(1.0).epsilon(1e-15));
        // continuous branch: theta = 2 atan t - pi, compared modulo 2 pi
        const double theta = monomial_phase(t);
        CHECK(std::abs(std::remainder(theta - std::arg(w), 2.0 * M_PI)) < 1e-12);
    }
    CHECK(monomial_phase(0.0) == Catch::Approx(-M_PI));
    CHECK(monomial_phase(1.0) == Catch::Approx(-M_PI / 2.0));
    CHECK(monomial_phase(-1.0) == Catch::Approx(-3.0 * M_PI / 2.0));
}

TEST_CASE("prefactor and asymmetric charge factor") {
    CHECK(prefactor(0.0, 2.0) == Catch::Approx(std::exp(-2.0)).epsilon(1e-15));
    const double S = std::sqrt(9.0 + 1.0);
    CHECK(prefactor(3.0, 0.5) == Catch::Approx(std::exp(-0.5 * S) / S).epsilon(1e-14));

    // ((1+t)/(1-t))^{a/2p}, reciprocal on the left branch
    const double t = 0.3, a = 1.2, p = 0.7;
    const double direct = std::pow((1.0 + t) / (1.0 - t), a / (2.0 * p));
    CHECK(asym_factor(t, a, p, Branch::right) == Catch::Approx(direct).epsilon(1e-13));
    CHECK(asym_factor(t, a, p, Branch::left) == Catch::Approx(1.0 / direct).epsilon(1e-13));
    CHECK(asym_factor(0.0, a, p, Branch::right) == 1.0);
    CHECK_THROWS_AS(asym_factor(1.0, a, p, Branch::right), validation_error);
}
