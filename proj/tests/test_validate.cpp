#include <cmath>
#include <numbers>

#include <limits>
#include <stdexcept>

#include "doctest.h"
#include "mlmc/numerics.hpp"
#include "mlmc/validate.hpp"
#include "test_helpers.hpp"

using namespace mlmc;
using mlmc_test::ou_problem;
using mlmc_test::unit_linear;

TEST_CASE("oracle means") {
    CHECK(*oracle_mean(ou_problem(1.0), unit_linear()) ==
          doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(*oracle_mean(ou_problem(0.0), unit_linear()) == doctest::Approx(0.0));
    const ProblemSpec pc({2.0}, 1.5, DriftModel::constant({3.0}));
    CHECK(*oracle_mean(pc, unit_linear()) == doctest::Approx(2.0 + 4.5).epsilon(1e-13));
    CHECK(!oracle_mean(ProblemSpec({0.0}, 1.0, DriftModel::smooth_sine(1, 1.0)), unit_linear()));
    CHECK(!oracle_mean(ou_problem(1.0), Payoff::squared_norm(1, 1.0)));

    // Euler-chain mean: one step of b = -x from x0 = 1 lands on 0
    CHECK(*oracle_mean_euler(ou_problem(1.0), unit_linear(), 1) == doctest::Approx(0.0));
    // large-n chain approaches the continuous mean
    CHECK(*oracle_mean_euler(ou_problem(1.0), unit_linear(), 1 << 20) ==
          doctest::Approx(std::exp(-1.0)).epsilon(1e-5));
}

TEST_CASE("orlicz norm: deterministic cases and homogeneity") {
    CHECK(orlicz_norm({0.0, 0.0, 0.0}) == 0.0);
    CHECK(orlicz_norm({2.5, 2.5, 2.5, 2.5}) == doctest::Approx(2.5).epsilon(1e-9));
    CHECK(orlicz_norm({-2.5, 2.5}) == doctest::Approx(2.5).epsilon(1e-9));
    CHECK_THROWS_AS(orlicz_norm({}), std::invalid_argument);

    RngStream rng(8, 0, 0);
    std::vector<double> xs(5000);
    for (auto& v : xs) v = rng.next_normal();
    const double base = orlicz_norm(xs);
    std::vector<double> scaled = xs;
    for (auto& v : scaled) v *= 3.0;
    CHECK(orlicz_norm(scaled) == doctest::Approx(3.0 * base).epsilon(1e-8));
}

TEST_CASE("orlicz norm of a standard normal matches the quadrature oracle") {
    // E Psi_e(|Z|/c) = 1  <=>  2 e^{t^2/2} Phi(t) = e with t = 1/c
    auto mgf_abs = [](double t) {
        const double cdf = 0.5 * (1.0 + std::erf(t / std::numbers::sqrt2));
        return 2.0 * std::exp(t * t / 2.0) * cdf;
    };
    const double t_star =
        bisect_root([&](double t) { return mgf_abs(t) - std::numbers::e; }, 0.5, 2.0, 1e-12);
    const double want = 1.0 / t_star;

    RngStream rng(9, 0, 0);
    std::vector<double> xs(1000000);
    for (auto& v : xs) v = rng.next_normal();
    CHECK(orlicz_norm(xs) == doctest::Approx(want).epsilon(0.01));
}

TEST_CASE("sup-integral MGF check at the worked values") {
    // mu = 1/8: simplified bound = sqrt(2), Gaussian sanity floor = 2/sqrt(3)
    const auto rep = check_sup_integral_mgf({0.0, 0.5, 1.0}, 1.0, 100000, 1024, 505);
    CHECK(rep.passed);
    REQUIRE(rep.series.size() == 3);
    const auto& exact = rep.series[0];
    // mu = 0 point: everything is exactly one
    CHECK(exact.points[0].empirical == doctest::Approx(1.0));
    CHECK(exact.points[0].bound == doctest::Approx(1.0));
    const auto& simplified = rep.series[1];
    CHECK(simplified.points[2].bound == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    const auto& lower = rep.series[2];
    CHECK(lower.points[2].bound == doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-12));
    // at mu = 1/8 exact-form and simplified bounds coincide at sqrt(2)
    CHECK(exact.points[2].bound == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

    CHECK_THROWS_AS(check_sup_integral_mgf({1.5}, 1.0, 100, 16, 1), std::invalid_argument);
}

TEST_CASE("strong error check passes with the expected slope") {
    ConstantsBundle k(ou_problem(0.0), LevelFactor::finite(2));
    const auto rep = check_strong_error(k, {4, 8, 16}, 20000, 99);
    CHECK(rep.passed);
    REQUIRE(rep.series[0].slope.has_value());
    CHECK(*rep.series[0].slope == doctest::Approx(-2.0).epsilon(0.15));
    // the bound is non-asymptotic: every ratio bound/empirical stays >= 1
    for (const auto& pt : rep.series[0].points) CHECK(pt.bound / pt.empirical >= 1.0);
}

TEST_CASE("strong error check with the exact reference (m = infinity)") {
    ConstantsBundle k(ou_problem(1.0), LevelFactor::infinite());
    const auto rep = check_strong_error(k, {4, 8}, 20000, 7);
    CHECK(rep.passed);
}

TEST_CASE("gap MGF check: trivial points and the OU run") {
    ConstantsBundle k(ou_problem(0.0), LevelFactor::finite(2));
    const auto rep = check_mgf_u(k, 8, {0.0, 0.5, 1.0}, 0.0, 20000, 21);
    CHECK(rep.passed);
    // rho = 0: both sides exactly one
    CHECK(rep.series[0].points[0].empirical == doctest::Approx(1.0));
    CHECK(rep.series[0].points[0].bound == doctest::Approx(1.0));

    const ProblemSpec pc({0.0}, 1.0, DriftModel::constant({1.0}));
    ConstantsBundle kc(pc, LevelFactor::finite(2));
    const auto repc = check_mgf_u(kc, 8, {1.0}, 0.0, 2000, 3);
    CHECK(repc.series[0].points[0].empirical == doctest::Approx(1.0));
    CHECK(repc.passed);

    CHECK_THROWS_AS(check_mgf_u(k, 8, {1.5}, 0.0, 1000, 1), std::invalid_argument);
}

TEST_CASE("Malliavin MGF check: constant drift is exactly one and OU passes") {
    const ProblemSpec pc({0.0}, 1.0, DriftModel::constant({1.0}));
    ConstantsBundle kc(pc, LevelFactor::finite(2));
    const auto repc = check_mgf_malliavin(kc, 8, 0.1, 0, {1.0}, 2000, 5);
    CHECK(repc.series[0].points[0].empirical == doctest::Approx(1.0));
    CHECK(repc.passed);

    ConstantsBundle k(ou_problem(0.0), LevelFactor::finite(2));
    const auto rep = check_mgf_malliavin(k, 8, 0.1, 0, {0.5, 1.0}, 20000, 11);
    CHECK(rep.passed);
}

TEST_CASE("estimator MGF check: level-0 Gaussian equality") {
    ConstantsBundle k(ou_problem(1.0), unit_linear(), LevelFactor::finite(2));
    LevelPlan plan{2, 0, {64}};
    const auto rep = check_estimator_mgf(k, plan, {-1.0, -0.5, 0.5, 1.0}, 4000, 1234);
    CHECK(rep.passed);
    REQUIRE(rep.series.size() == 2);  // one-sided bound plus the equality series
    for (const auto& pt : rep.series[1].points) {
        // two-sided: empirical within 3 SE of exp(lambda^2 T / (2 N0))
        CHECK(std::fabs(pt.empirical - pt.bound) <= 3.0 * pt.std_error);
    }
    CHECK_THROWS_AS(check_estimator_mgf(k, plan, {2.0}, 100, 1), std::invalid_argument);
}

TEST_CASE("estimator MGF check on a short multilevel plan") {
    ConstantsBundle k(ou_problem(1.0), unit_linear(), LevelFactor::finite(2));
    LevelPlan plan{2, 2, {400, 160, 60}};
    const auto rep = check_estimator_mgf(k, plan, {-1.0, 0.0, 1.0}, 2000, 77);
    CHECK(rep.passed);
    // lambda = 0: both sides exactly one
    CHECK(rep.series[0].points[1].empirical == doctest::Approx(1.0));
    CHECK(rep.series[0].points[1].bound == doctest::Approx(1.0));
}

TEST_CASE("estimator MGF centering falls back to the auxiliary run for the sine drift") {
    const ProblemSpec p({0.0}, 1.0, DriftModel::smooth_sine(1, 0.5));
    ConstantsBundle k(p, unit_linear(), LevelFactor::finite(2));
    LevelPlan plan{2, 0, {64}};
    const auto rep = check_estimator_mgf(k, plan, {-0.5, 0.5}, 1000, 17);
    CHECK(rep.passed);
    bool noted_aux = false;
    for (const auto& n : rep.notes) noted_aux = noted_aux || n.find("auxiliary") != std::string::npos;
    CHECK(noted_aux);
    CHECK(rep.series.size() == 1);  // no exact-centering equality series
}

TEST_CASE("MSE check at a forgiving precision") {
    ConstantsBundle k(ou_problem(1.0), unit_linear(), LevelFactor::finite(2));
    const OptimalPlan plan = optimal_plan(k, unit_linear(), 0.2);
    const auto rep = check_mse(k, plan.plan(), 0.2, 150, 31);
    CHECK(rep.passed);
    REQUIRE(rep.series.size() == 2);
    CHECK(rep.series[1].points[0].empirical <= 0.2);
}

TEST_CASE("concentration check: trivial alpha points and the bound shapes") {
    ConstantsBundle k(ou_problem(1.0), unit_linear(), LevelFactor::finite(2));
    const double eps = 0.2;
    const double bias = [] {
        ConstantsBundle kk(ou_problem(1.0), unit_linear(), LevelFactor::finite(2));
        const OptimalPlan p = optimal_plan(kk, unit_linear(), 0.2);
        return bias_bound(kk, unit_linear(), p.L);
    }();
    // custom grid containing alpha == bias: the full-plan bound degenerates to 2
    const auto rep = check_concentration(k, eps, {bias / 2.0, bias, 0.05}, 400, 88);
    REQUIRE(rep.series.size() == 2);
    CHECK(rep.series[0].points[0].bound == doctest::Approx(2.0));
    CHECK(rep.series[0].points[1].bound == doctest::Approx(2.0));
    CHECK(rep.passed);
    // the simplified bound carries the e^{min(2/c3, c4 eps^{2/3})} prefactor
    const double pref = std::exp(std::min(2.0 / k.c3(), k.c4() * std::pow(eps, 2.0 / 3.0)));
    CHECK(rep.series[1].points[0].bound ==
          doctest::Approx(2.0 * pref *
                          std::exp(-bias * bias / (4.0 * k.c3() * eps * eps))));
    // empirical tail must be monotone non-increasing in alpha (same replication set)
    const auto& pts = rep.series[0].points;
    CHECK(pts[0].empirical + 1e-12 >= pts[1].empirical);

    // no closed form for the sine drift: rejected
    ConstantsBundle ks(ProblemSpec({0.0}, 1.0, DriftModel::smooth_sine(1, 1.0)), unit_linear(),
                       LevelFactor::finite(2));
    CHECK_THROWS_AS(check_concentration(ks, 0.1, {}, 100, 1), std::invalid_argument);
}

TEST_CASE("boosted concentration check widens the deviation range") {
    ConstantsBundle k(ou_problem(1.0), unit_linear(), LevelFactor::finite(2));
    const double eps = 0.2;
    const auto plain = check_concentration(k, eps, {}, 300, 21);
    const auto boosted = check_concentration(k, eps, {}, 300, 21, 1.5);
    CHECK(plain.passed);
    CHECK(boosted.passed);
    // the boosted alpha range is c5(eps, beta) instead of c2 eps^{2/3}
    const double plain_max = plain.series[0].points.back().grid_value;
    const double boosted_max = boosted.series[0].points.back().grid_value;
    CHECK(plain_max == doctest::Approx(k.c2() * std::pow(eps, 2.0 / 3.0)).epsilon(1e-12));
    CHECK(boosted_max == doctest::Approx(k.c5(eps, 1.5)).epsilon(1e-12));
}

TEST_CASE("orlicz bound check on a forgiving precision") {
    ConstantsBundle k(ou_problem(1.0), unit_linear(), LevelFactor::finite(2));
    const auto rep = check_orlicz_bounds(k, 0.2, 400, 13);
    REQUIRE(rep.series.size() == 3);
    CHECK(rep.series[0].passed);  // MLMC norm <= c6 eps
    CHECK(rep.series[1].passed);  // standard-MC norm <= envelope upper
    CHECK(rep.series[2].passed);  // standard-MC norm >= envelope lower
}

TEST_CASE("reports are reproducible bit-for-bit") {
    ConstantsBundle k(ou_problem(0.0), LevelFactor::finite(2));
    const auto a = check_mgf_u(k, 8, {0.5, 1.0}, 0.0, 4000, 42);
    const auto b = check_mgf_u(k, 8, {0.5, 1.0}, 0.0, 4000, 42, 3);
    REQUIRE(a.series[0].points.size() == b.series[0].points.size());
    for (size_t i = 0; i < a.series[0].points.size(); ++i) {
        CHECK(a.series[0].points[i].empirical == b.series[0].points[i].empirical);
        CHECK(a.series[0].points[i].std_error == b.series[0].points[i].std_error);
    }
    const auto c = check_mgf_u(k, 8, {0.5, 1.0}, 0.0, 4000, 43);
    CHECK(a.series[0].points[0].empirical != c.series[0].points[0].empirical);
}

TEST_CASE("verdicts are a pure function of empirical, SE and bound") {
    ConstantsBundle k(ou_problem(0.0), LevelFactor::finite(2));
    const auto rep = check_strong_error(k, {4, 8}, 2000, 3);
    for (const auto& s : rep.series)
        for (const auto& p : s.points)
            CHECK(p.satisfied == (p.empirical - 3.0 * p.std_error <= p.bound));
}
