#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <complex>

#include "sphfun/recurrence.hpp"

using namespace sphfun;

static cplx closed_form_weight(int m, double p, double a, double lambda, double n,
                               int d) {
    const double sig = a / (2.0 * p);
    const cplx ppl(p, sig), pmi(p, -sig);
    switch (d) {
        case 2: return (n + 1.0) * (n - 2.0 * m + 1.0);
        case 1: return 2.0 * ppl * (2.0 * n - 2.0 * m + 1.0);
        case 0:
            return 2.0 * n * n - 4.0 * m * n +
                   4.0 * (lambda + p * p - sig * sig) + 2.0;
        case -1: return -2.0 * pmi * (2.0 * n - 2.0 * m - 1.0);
        case -2: return (n - 1.0) * (n - 2.0 * m - 1.0);
    }
    return 0.0;
}

TEST_CASE("five-term weights match their factored forms") {
    for (int m : {0, 1, 2, 3}) {
        const double p = 0.8, a = 0.6, lambda = -4.2;
        const FiveTermTable T = five_term_table(m, p, a, lambda);
        for (int n = 0; n <= 25; n += 5)
            for (int d = -2; d <= 2; ++d) {
                const cplx w = T.weight(n, d);
                const cplx ref = closed_form_weight(m, p, a, lambda, n, d);
                CHECK(std::abs(w - ref) < 1e-12 * (1.0 + std::abs(ref)));
            }
    }
}

TEST_CASE("backward pivot dies exactly at n = 1 and n = 2m+1") {
    for (int m : {0, 1, 2, 4}) {
        const FiveTermTable T = five_term_table(m, 1.3, 0.4, -2.0);
        CHECK(std::abs(T.weight(1, -2)) == 0.0);
        CHECK(std::abs(T.weight(2 * m + 1, -2)) == 0.0);
        for (int n = 2; n <= 2 * m + 6; ++n) {
            if (n == 2 * m + 1) continue;
            CHECK(std::abs(T.weight(n, -2)) > 0.0);
        }
        CHECK_THROWS_AS(
            five_term_step_backward(T, 1, {cplx(1.0), cplx(1.0), cplx(1.0), cplx(1.0)}),
            numeric_error);
    }
}

TEST_CASE("g-set weights are the charge-reflected (conjugate) f-set weights") {
    const int m = 2;
    const double p = 1.1, a = 0.9, lambda = -6.0;
    const FiveTermTable Tf = five_term_table(m, p, a, lambda, SetId::f_set);
    const FiveTermTable Tg = five_term_table(m, p, a, lambda, SetId::g_set);
    const FiveTermTable Tn = five_term_table(m, p, -a, lambda, SetId::f_set);
    for (int n = 0; n <= 12; ++n)
        for (int d = -2; d <= 2; ++d) {
            CHECK(std::abs(Tg.weight(n, d) - Tn.weight(n, d)) == 0.0);
            CHECK(std::abs(Tg.weight(n, d) - std::conj(Tf.weight(n, d))) < 1e-14);
        }
}

TEST_CASE("backward step solves its own row") {
    const FiveTermTable T = five_term_table(1, 0.9, 0.3, -3.7);
    const std::array<cplx, 4> win{cplx(0.2, 0.1), cplx(-0.5, 0.4), cplx(1.0, -0.2),
                                  cplx(0.3, 0.0)};
    const int n = 7;
    const cplx fm2 = five_term_step_backward(T, n, win);
    const cplx row = T.weight(n, 2) * win[0] + T.weight(n, 1) * win[1] +
                     T.weight(n, 0) * win[2] + T.weight(n, -1) * win[3] +
                     T.weight(n, -2) * fm2;
    CHECK(std::abs(row) < 1e-12);
}

TEST_CASE("extended-precision weights agree with the double path") {
    const FiveTermTable T = five_term_table(2, 2.0, 1.0, -20.0);
    for (int n = 0; n <= 2000; n += 137)
        for (int d = -2; d <= 2; ++d) {
            const cplx w = T.weight(n, d);
            const std::complex<long double> wl = T.weight_l(n, d);
            CHECK(std::abs(cplx(double(wl.real()), double(wl.imag())) - w) <=
                  1e-12 * (1.0 + std::abs(w)));
        }
}

TEST_CASE("n0 threshold formula") {
    CHECK(n0_threshold(0, 1.0, 0.0) == 0.0);
    CHECK(n0_threshold(2, 1.0, 0.0) == Catch::Approx(16.0));
    CHECK(n0_threshold(0, 0.5, 1.0) == Catch::Approx(8.0));
    CHECK(n0_threshold(1, 2.0, 2.0) ==
          Catch::Approx(std::sqrt(16.0 + 64.0)).epsilon(1e-14));
    CHECK_THROWS_AS(n0_threshold(1, 0.0, 1.0), validation_error);
}

TEST_CASE("four-term pivots factor as (2n-1)(n-1) and n(2n-1)") {
    const FourTermTable Te = four_term_table(1, 0.7, -2.5, Parity::even);
    const FourTermTable To = four_term_table(1, 0.7, -2.5, Parity::odd);
    for (int n = 0; n <= 10; ++n) {
        CHECK(Te.weight(n, -1) ==
              Catch::Approx((2.0 * n - 1.0) * (n - 1.0)).margin(1e-12));
        CHECK(To.weight(n, -1) == Catch::Approx(n * (2.0 * n - 1.0)).margin(1e-12));
    }
    CHECK(Te.weight(1, -1) == 0.0);
    CHECK(To.weight(0, -1) == 0.0);
    CHECK_THROWS_AS(four_term_step_backward(Te, 1, {1.0, 1.0, 1.0}), numeric_error);
}

TEST_CASE("four-term backward step solves its own row") {
    for (Parity par : {Parity::even, Parity::odd}) {
        const FourTermTable T = four_term_table(2, 1.4, -8.0, par);
        const std::array<double, 3> win{0.4, -1.2, 0.9};
        const int n = 6;
        const double fm1 = four_term_step_backward(T, n, win);
        const double row = T.weight(n, 2) * win[0] + T.weight(n, 1) * win[1] +
                           T.weight(n, 0) * win[2] + T.weight(n, -1) * fm1;
        CHECK(std::abs(row) < 1e-10);
    }
}

TEST_CASE("high-order weight ratios approach the characteristic normalization") {
    // Dividing row n by n^2: edge columns tend to 1, the middle to 2, the
    // odd columns to 0; this is what makes the characteristic quartic
    // (l^2+1)^2 in the limit.
    const FiveTermTable T = five_term_table(1, 1.0, 0.5, -5.0);
    const double n = 1e6;
    CHECK(std::abs(T.weight(n, 2) / (n * n) - 1.0) < 1e-5);
    CHECK(std::abs(T.weight(n, -2) / (n * n) - 1.0) < 1e-5);
    CHECK(std::abs(T.weight(n, 0) / (n * n) - 2.0) < 1e-5);
    CHECK(std::abs(T.weight(n, 1) / (n * n)) < 1e-4);
    CHECK(std::abs(T.weight(n, -1) / (n * n)) < 1e-4);
}
