#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "sphfun/polyroots.hpp"
#include "sphfun/recurrence.hpp"

using namespace sphfun;

TEST_CASE("companion roots of a factored cubic") {
    // (z-1)(z-2)(z-3) = z^3 - 6z^2 + 11z - 6
    const std::vector<cplx> c{-6.0, 11.0, -6.0, 1.0};
    const std::vector<cplx> r = poly_roots(c);
    REQUIRE(r.size() == 3);
    CHECK(std::abs(r[0] - 1.0) < 1e-12);
    CHECK(std::abs(r[1] - 2.0) < 1e-12);
    CHECK(std::abs(r[2] - 3.0) < 1e-12);
}

TEST_CASE("leading zeros are trimmed, degenerate input throws") {
    const std::vector<cplx> c{-2.0, 1.0, 0.0, 0.0}; // z - 2 padded with zeros
    const std::vector<cplx> r = poly_roots(c);
    REQUIRE(r.size() == 1);
    CHECK(std::abs(r[0] - 2.0) < 1e-14);
    CHECK_THROWS_AS(poly_roots(std::vector<cplx>{1.0}), numeric_error);
    CHECK_THROWS_AS(quartic_roots(five_term_table(0, 1.0, 0.0, -2.0), 0),
                    validation_error);
}

TEST_CASE("quartic roots tend to the repeated pair {i, i, -i, -i}") {
    const FiveTermTable T = five_term_table(1, 1.0, 0.8, -4.0);
    for (int n : {100000, 1000000}) {
        const std::vector<cplx> r = quartic_roots(T, n);
        REQUIRE(r.size() == 4);
        for (const cplx& z : r) {
            CHECK(std::abs(std::abs(z.imag()) - 1.0) < 1e-2);
            CHECK(std::abs(z.real()) < 1e-2);
        }
        // the double roots split as n^{-1/2}, so the distance shrinks like
        // 1/sqrt(n), not 1/n
        double dmax = 0.0;
        for (const cplx& z : r)
            dmax = std::max(dmax, std::abs(z - cplx(0.0, z.imag() > 0 ? 1.0 : -1.0)));
        CHECK(dmax < 5.0 / std::sqrt(double(n)));
        CHECK(dmax > 0.05 / std::sqrt(double(n)));
    }
}

TEST_CASE("exactly two quartic roots inside the unit circle beyond n0") {
    std::mt19937 rng(7u);
    std::uniform_real_distribution<double> up(0.4, 2.4), ua(-2.0, 2.0),
        ul(-20.0, 4.0);
    std::uniform_int_distribution<int> um(0, 3);
    for (int trial = 0; trial < 40; ++trial) {
        const int m = um(rng);
        const double p = up(rng), a = ua(rng), lambda = ul(rng);
        const FiveTermTable T = five_term_table(m, p, a, lambda);
        const int n = int(n0_threshold(m, p, a)) + 8 + 4 * trial;
        const std::vector<cplx> r = quartic_roots(T, n);
        CHECK(count_inside_unit_circle(r) == 2);
    }
}

TEST_CASE("cubic roots are real positive with exactly one below 1") {
    for (Parity par : {Parity::even, Parity::odd}) {
        const FourTermTable T = four_term_table(1, 1.2, -6.0, par);
        for (int n : {50, 500, 5000}) {
            const std::vector<cplx> r = cubic_roots(T, n);
            REQUIRE(r.size() == 3);
            int below = 0;
            for (const cplx& z : r) {
                CHECK(std::abs(z.imag()) < 1e-8 * (1.0 + std::abs(z)));
                CHECK(z.real() > 0.0);
                if (std::abs(z) < 1.0) ++below;
            }
            CHECK(below == 1);
        }
        // n -> inf limit {1, 1, 2}
        const std::vector<cplx> r = cubic_roots(T, 4000000);
        CHECK(std::abs(r[0] - 1.0) < 2e-3);
        CHECK(std::abs(r[1] - 1.0) < 2e-3);
        CHECK(std::abs(r[2] - 2.0) < 2e-3);
    }
}
