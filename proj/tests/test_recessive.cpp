#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "sphfun/recessive.hpp"

using namespace sphfun;

static double row_residual(const FiveTermTable& T, const std::vector<cplx>& f, int n) {
    cplx acc = 0.0;
    double scale = 0.0;
    for (int d = -2; d <= 2; ++d) {
        const int j = n + d;
        if (j < 0 || j >= int(f.size())) continue;
        acc += T.weight(n, d) * f[size_t(j)];
        scale = std::max(scale, std::abs(T.weight(n, d) * f[size_t(j)]));
    }
    return scale > 0.0 ? std::abs(acc) / scale : 0.0;
}

TEST_CASE("recessive pair satisfies every recursion row it consumed") {
    const int m = 1, N = 120;
    const FiveTermTable T = five_term_table(m, 1.0, 0.7, -5.0);
    const RecessivePair pair = recessive_pair(T, N, 2 * m);
    for (int si = 0; si < 2; ++si) {
        std::vector<cplx> f(size_t(N + 3), cplx(0.0));
        for (int n = 2 * m; n <= N + 2; ++n) f[size_t(n)] = pair.at(n)[size_t(si)];
        for (int n = 2 * m + 2; n <= N; n += 7)
            CHECK(row_residual(T, f, n) < 1e-12);
        // seeds: f_{N+1} = f_{N+2} = 0, f_N and f_{N-1} unit-seeded
        CHECK(std::abs(f[size_t(N + 1)]) == 0.0);
        CHECK(std::abs(f[size_t(N + 2)]) == 0.0);
    }
    CHECK(std::abs(pair.at(N)[0] - cplx(1.0)) == 0.0);
    CHECK(std::abs(pair.at(N - 1)[1] - cplx(1.0)) == 0.0);
    CHECK_THROWS_AS(recessive_pair(T, 2 * m + 1, 2 * m), validation_error);
}

TEST_CASE("recessive values grow backward (the pair is minimal at the tail)") {
    // Backward recursion amplifies toward low n: |f_n| at the bottom dwarfs
    // the unit seed, which is exactly why forward recursion cannot reach the
    // recessive solution.
    const FiveTermTable T = five_term_table(0, 1.0, 0.0, -2.654);
    const RecessivePair pair = recessive_pair(T, 400, 0);
    const double bottom = std::abs(pair.at(0)[0]);
    CHECK(bottom * std::exp(pair.log_scale) > 1e6);
}

TEST_CASE("side cascade satisfies all rows except the two residual slots") {
    for (int m : {0, 1, 2}) {
        const int N = 150;
        const auto sides = side_cascade(m, 1.1, 0.4, -4.0, N, Branch::right);
        const FiveTermTable T = five_term_table(m, 1.1, 0.4, -4.0, SetId::f_set);
        for (const SideSeed& S : sides) {
            for (int n = 1; n <= N; ++n) {
                if (n == 2 * m + 1 || n == 0) continue; // residual rows
                CHECK(row_residual(T, S.f, n) < 1e-10);
            }
            // spill rows below the series: only f_0 and f_1 reach them;
            // E_{-2} = (2m+1) f_0
            CHECK(std::abs(S.sm2 - (2.0 * m + 1.0) * S.f[0] / S.scale) < 1e-12);
        }
    }
}

TEST_CASE("left cascade is the charge-reflected right cascade") {
    const int m = 1, N = 100;
    const double p = 0.9, a = 0.8, lambda = -3.5;
    const auto left = side_cascade(m, p, a, lambda, N, Branch::left);
    const auto right_neg = side_cascade(m, p, -a, lambda, N, Branch::right);
    for (int si = 0; si < 2; ++si)
        for (int n = 0; n <= N; n += 11)
            CHECK(std::abs(left[size_t(si)].f[size_t(n)] -
                           right_neg[size_t(si)].f[size_t(n)]) < 1e-12);
}

TEST_CASE("normalized side determinant lives in the unit disc") {
    for (double lambda : {-8.0, -5.0, -2.0, 0.5}) {
        const cplx d = side_determinant(1, 1.0, 0.5, lambda, 200);
        CHECK(std::abs(d) <= 1.0 + 1e-12);
    }
}
