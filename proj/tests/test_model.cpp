#include <cmath>

#include <limits>
#include <stdexcept>

#include "doctest.h"
#include "mlmc/model.hpp"
#include "mlmc/rng.hpp"

using namespace mlmc;

namespace {

DriftModel minus_x(int d = 1) {
    Mat A(d, d);
    for (int i = 0; i < d; ++i) A(i, i) = -1.0;
    return DriftModel::affine(A, Vec(d, 0.0));
}

}  // namespace

TEST_CASE("drift evaluators: affine") {
    const DriftModel b = minus_x();
    CHECK(b.value({2.0})[0] == doctest::Approx(-2.0));
    CHECK(b.laplacian({5.0})[0] == 0.0);
    CHECK(b.jacobian({0.3})(0, 0) == doctest::Approx(-1.0));
    CHECK(b.laplacian_jacobian({0.3})(0, 0) == 0.0);
    CHECK_THROWS_AS(b.value({1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("drift evaluators: smooth-sine at the origin") {
    const DriftModel b = DriftModel::smooth_sine(1, 1.0);
    CHECK(b.jacobian({0.0})(0, 0) == doctest::Approx(1.0));  // cos 0
    CHECK(b.value({0.0})[0] == doctest::Approx(0.0));
    CHECK(b.laplacian({1.0})[0] == doctest::Approx(-std::sin(1.0)));
}

TEST_CASE("registry constants are the tight analytic ones") {
    const DriftModel aff = minus_x(3);
    CHECK(aff.lip_grad() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(aff.lap_growth() == 0.0);
    CHECK(aff.grad_lap_growth() == 0.0);
    CHECK(aff.hess_bound() == doctest::Approx(DriftModel::kTinyBound));

    const int d = 4;
    const double a = 2.5;
    const DriftModel sine = DriftModel::smooth_sine(d, a);
    CHECK(sine.lip_grad() == doctest::Approx(a));
    CHECK(sine.lap_growth() == doctest::Approx(a * std::sqrt(double(d)) / 2.0));
    CHECK(sine.hess_bound() == doctest::Approx(a));
    CHECK(sine.grad_lap_growth() == doctest::Approx(a * std::sqrt(double(d)) / 2.0));
}

TEST_CASE("constant positivity is enforced") {
    DriftModel b = minus_x();
    CHECK_THROWS_AS(b.set_lip_grad(0.0), std::invalid_argument);
    CHECK_THROWS_AS(b.set_hess_bound(-1.0), std::invalid_argument);
    CHECK_THROWS_AS(b.set_lap_growth(-0.1), std::invalid_argument);
    b.set_lap_growth(0.0);  // zero growth is allowed
}

TEST_CASE("problem spec validation") {
    CHECK_THROWS_AS(ProblemSpec({1.0}, 0.0, minus_x()), std::invalid_argument);
    CHECK_THROWS_AS(ProblemSpec({1.0, 2.0}, 1.0, minus_x()), std::invalid_argument);
    const ProblemSpec p({2.0}, 1.0, minus_x());
    CHECK(p.b_norm_at_x0() == doctest::Approx(2.0));
}

TEST_CASE("validate_assumptions on sound declarations") {
    const ProblemSpec p({0.0}, 1.0, minus_x());
    const auto rep = validate_assumptions(p, 1000, 10.0, 99);
    CHECK(rep.ok());
    // constant Jacobian of norm exactly one
    CHECK(rep.ratios[0].max_ratio == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("validate_assumptions flags an undersized lip_grad") {
    DriftModel b = minus_x();
    b.set_lip_grad(0.5);
    const ProblemSpec p({0.0}, 1.0, b);
    const auto rep = validate_assumptions(p, 200, 5.0, 99);
    CHECK_FALSE(rep.ok());
    CHECK(rep.violations.size() == 1);
}

TEST_CASE("validate_assumptions on the sine family") {
    // |lap b| = |sin x| <= 1 <= 2 * 0.5 * (1 + |x - x0|)
    DriftModel b = DriftModel::smooth_sine(1, 1.0);
    b.set_lap_growth(0.5);
    const ProblemSpec p({0.0}, 1.0, b);
    const auto rep = validate_assumptions(p, 2000, 10.0, 7);
    CHECK(rep.ok());
}

TEST_CASE("finite differences agree with analytic gradients at random points") {
    RngStream rng(5, 0, 0);
    for (const DriftModel& b : {minus_x(2), DriftModel::smooth_sine(2, 1.7)}) {
        for (int s = 0; s < 100; ++s) {
            Vec x{4.0 * rng.next_double() - 2.0, 4.0 * rng.next_double() - 2.0};
            const Mat J = b.jacobian(x);
            for (int j = 0; j < 2; ++j) {
                Vec xp = x, xm = x;
                xp[j] += 1e-5;
                xm[j] -= 1e-5;
                const Vec bp = b.value(xp), bm = b.value(xm);
                for (int i = 0; i < 2; ++i) {
                    const double fd = (bp[i] - bm[i]) / 2e-5;
                    CHECK(std::fabs(fd - J(i, j)) <= 1e-6 * std::max(1.0, b.lip_grad()));
                }
            }
        }
    }
}

TEST_CASE("custom drifts: supplied and missing evaluators") {
    // hand-rolled clone of the sine family with every evaluator supplied
    auto full = DriftModel::custom(
        1, [](const Vec& x) { return Vec{std::sin(x[0])}; },
        [](const Vec& x) {
            Mat J(1, 1);
            J(0, 0) = std::cos(x[0]);
            return J;
        },
        [](const Vec& x) { return Vec{-std::sin(x[0])}; },
        [](const Vec& x) {
            Mat J(1, 1);
            J(0, 0) = -std::cos(x[0]);
            return J;
        },
        1.0, 0.5, 1.0, 0.5);
    const ProblemSpec p({0.0}, 1.0, full);
    CHECK(validate_assumptions(p, 500, 8.0, 17).ok());

    // laplacian evaluators omitted: those orders are rejected, the rest work
    auto partial = DriftModel::custom(
        1, [](const Vec& x) { return Vec{std::sin(x[0])}; },
        [](const Vec& x) {
            Mat J(1, 1);
            J(0, 0) = std::cos(x[0]);
            return J;
        },
        nullptr, nullptr, 1.0, 0.5, 1.0, 0.5);
    CHECK(partial.value({0.5})[0] == doctest::Approx(std::sin(0.5)));
    CHECK_THROWS_AS(partial.laplacian({0.5}), std::domain_error);
    CHECK_THROWS_AS(partial.laplacian_jacobian({0.5}), std::domain_error);
    const ProblemSpec pp({0.0}, 1.0, partial);
    CHECK(validate_assumptions(pp, 200, 8.0, 17).ok());  // skips the missing orders

    CHECK_THROWS_AS(DriftModel::custom(1, nullptr, nullptr, nullptr, nullptr, 1, 0, 1, 0),
                    std::invalid_argument);
}

TEST_CASE("payoff families") {
    const Payoff f = Payoff::linear({3.0, 4.0});
    CHECK(f.lip() == doctest::Approx(5.0));
    CHECK(f.grad_lip() == doctest::Approx(5.0));  // registry default
    CHECK(f({1.0, 1.0}) == doctest::Approx(7.0));
    CHECK(f.gradient({9.0, 9.0})[0] == doctest::Approx(3.0));

    // sampled Lipschitz inequalities
    RngStream rng(11, 0, 0);
    for (int s = 0; s < 200; ++s) {
        Vec x{rng.next_normal(), rng.next_normal()};
        Vec y{rng.next_normal(), rng.next_normal()};
        CHECK(std::fabs(f(x) - f(y)) <= f.lip() * norm2(x - y) * (1.0 + 1e-12));
        CHECK(norm2(f.gradient(x) - f.gradient(y)) <= f.grad_lip() * norm2(x - y) + 1e-15);
    }

    const Payoff sq = Payoff::squared_norm(2, 1.0);
    CHECK(sq({1.0, 2.0}) == doctest::Approx(5.0));
    CHECK(sq.gradient({1.0, 2.0})[1] == doctest::Approx(4.0));

    CHECK_THROWS_AS(Payoff::linear({0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(Payoff::linear({1.0}, 0.0, std::nullopt, 0.5), std::invalid_argument);
}
