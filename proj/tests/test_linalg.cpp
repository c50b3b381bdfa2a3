#include <cmath>

#include <limits>
#include <stdexcept>

#include "doctest.h"
#include "mlmc/linalg.hpp"

using namespace mlmc;

TEST_CASE("expm on scalars, rotations and nilpotents") {
    {
        Mat A(1, 1);
        A(0, 0) = -1.3;
        CHECK(expm(A)(0, 0) == doctest::Approx(std::exp(-1.3)).epsilon(1e-13));
    }
    {
        // rotation generator: expm([[0,-w],[w,0]]) = [[cos w, -sin w],[sin w, cos w]]
        const double w = 0.7;
        Mat A(2, 2);
        A(0, 1) = -w;
        A(1, 0) = w;
        const Mat E = expm(A);
        CHECK(E(0, 0) == doctest::Approx(std::cos(w)).epsilon(1e-13));
        CHECK(E(0, 1) == doctest::Approx(-std::sin(w)).epsilon(1e-13));
        CHECK(E(1, 0) == doctest::Approx(std::sin(w)).epsilon(1e-13));
    }
    {
        // nilpotent: expm([[0,a],[0,0]]) = I + A
        Mat A(2, 2);
        A(0, 1) = 5.0;
        const Mat E = expm(A);
        CHECK(E(0, 0) == doctest::Approx(1.0));
        CHECK(E(0, 1) == doctest::Approx(5.0).epsilon(1e-14));
        CHECK(E(1, 1) == doctest::Approx(1.0));
    }
    {
        // large norm exercises the scaling-and-squaring branch
        Mat A(1, 1);
        A(0, 0) = 12.0;
        CHECK(expm(A)(0, 0) == doctest::Approx(std::exp(12.0)).epsilon(1e-12));
    }
}

TEST_CASE("expm_with_integral matches scalar closed forms") {
    Mat A(1, 1);
    A(0, 0) = -0.8;
    const double h = 0.6;
    const auto [M1, M2] = expm_with_integral(A, h);
    CHECK(M1(0, 0) == doctest::Approx(std::exp(-0.8 * h)).epsilon(1e-13));
    CHECK(M2(0, 0) == doctest::Approx((1.0 - std::exp(-0.8 * h)) / 0.8).epsilon(1e-13));
}

TEST_CASE("matrix power with geometric sum") {
    Mat M(1, 1);
    M(0, 0) = 0.9;
    for (std::uint64_t n : {0ull, 1ull, 5ull, 1000ull}) {
        const auto [P, S] = matrix_power_with_geom_sum(M, n);
        CHECK(P(0, 0) == doctest::Approx(std::pow(0.9, double(n))).epsilon(1e-12));
        const double want = (1.0 - std::pow(0.9, double(n))) / 0.1;
        CHECK(S(0, 0) == doctest::Approx(want).epsilon(1e-12));
    }
    // small matrix case against a direct loop
    Mat B(2, 2);
    B(0, 0) = 0.5;
    B(0, 1) = 0.25;
    B(1, 1) = -0.3;
    const auto [P, S] = matrix_power_with_geom_sum(B, 7);
    Mat Pd = Mat::identity(2), Sd(2, 2, 0.0);
    for (int i = 0; i < 7; ++i) {
        Sd = Sd + Pd;
        Pd = matmul(Pd, B);
    }
    for (size_t i = 0; i < P.a.size(); ++i) {
        CHECK(P.a[i] == doctest::Approx(Pd.a[i]).epsilon(1e-12));
        CHECK(S.a[i] == doctest::Approx(Sd.a[i]).epsilon(1e-12));
    }
}

TEST_CASE("lu_solve and cholesky") {
    Mat A(2, 2);
    A(0, 0) = 4.0;
    A(0, 1) = 1.0;
    A(1, 0) = 1.0;
    A(1, 1) = 3.0;
    Mat B(2, 1);
    B(0, 0) = 1.0;
    B(1, 0) = 2.0;
    Mat X = B;
    lu_solve(A, X);
    CHECK(4.0 * X(0, 0) + X(1, 0) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(X(0, 0) + 3.0 * X(1, 0) == doctest::Approx(2.0).epsilon(1e-13));

    const Mat L = cholesky(A);
    const Mat LLt = matmul(L, [&] {
        Mat Lt(2, 2);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) Lt(i, j) = L(j, i);
        return Lt;
    }());
    for (size_t i = 0; i < A.a.size(); ++i) CHECK(LLt.a[i] == doctest::Approx(A.a[i]).epsilon(1e-13));
}

TEST_CASE("operator norm") {
    Mat A(2, 2);
    A(0, 0) = 3.0;
    A(1, 1) = -5.0;
    CHECK(operator_norm(A) == doctest::Approx(5.0).epsilon(1e-10));
    Mat B(1, 1);
    B(0, 0) = -1.0;
    CHECK(operator_norm(B) == doctest::Approx(1.0));
}
