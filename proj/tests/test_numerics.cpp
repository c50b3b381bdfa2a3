#include <cmath>
#include <numbers>

#include <limits>
#include <stdexcept>

#include "doctest.h"
#include "mlmc/numerics.hpp"

using namespace mlmc;

namespace {

// lower incomplete gamma at s = 3/2 in closed form through erf
double lower_gamma_3half(double x) {
    return std::sqrt(std::numbers::pi) / 2.0 * std::erf(std::sqrt(x)) -
           std::sqrt(x) * std::exp(-x);
}

}  // namespace

TEST_CASE("quadrature matches the incomplete-gamma oracle") {
    // int_0^T e^{b(T-t)} sqrt(t) dt = e^{bT} b^{-3/2} gamma(3/2, bT)
    for (double b : {0.3, 1.0, 2.5}) {
        for (double T : {0.5, 1.0, 2.0}) {
            const double got =
                integrate([&](double t) { return std::exp(b * (T - t)) * std::sqrt(t); }, 0.0, T);
            const double want = std::exp(b * T) * std::pow(b, -1.5) * lower_gamma_3half(b * T);
            CHECK(got == doctest::Approx(want).epsilon(1e-10));
        }
    }
}

TEST_CASE("quadrature handles polynomials and endpoint square roots") {
    CHECK(integrate([](double t) { return t * t * t; }, 0.0, 2.0) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(integrate([](double t) { return std::sqrt(t); }, 0.0, 1.0) ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-10));
    CHECK(integrate([](double) { return 1.0; }, 1.0, 1.0) == 0.0);
}

TEST_CASE("bisection root finder") {
    const double r = bisect_root([](double x) { return x * x - 2.0; }, 0.0, 2.0);
    CHECK(r == doctest::Approx(std::sqrt(2.0)).epsilon(1e-11));
    CHECK_THROWS_AS(bisect_root([](double x) { return x * x + 1.0; }, 0.0, 1.0), std::domain_error);
}

TEST_CASE("golden-section maximizer") {
    const double x = golden_section_max([](double t) { return -(t - 0.37) * (t - 0.37); }, 0.0, 1.0);
    CHECK(x == doctest::Approx(0.37).epsilon(1e-7));
}

TEST_CASE("regularized incomplete beta basics") {
    CHECK(reg_incomplete_beta(1.0, 1.0, 0.3) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(reg_incomplete_beta(2.0, 1.0, 0.5) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(reg_incomplete_beta(3.0, 2.0, 1.0) == 1.0);
    CHECK(reg_incomplete_beta(3.0, 2.0, 0.0) == 0.0);
}

namespace {

// independent oracle: Clopper-Pearson upper bound solves P(Bin(n,u) <= x) = 1 - conf
double cp_upper_by_binomial_sum(std::int64_t x, std::int64_t n, double conf) {
    auto cdf = [&](double u) {
        double acc = 0.0;
        for (std::int64_t k = 0; k <= x; ++k) {
            double logpmf = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
                            k * std::log(u) + (n - k) * std::log1p(-u);
            acc += std::exp(logpmf);
        }
        return acc;
    };
    return bisect_root([&](double u) { return cdf(u) - (1.0 - conf); }, 1e-12, 1.0 - 1e-12, 1e-12);
}

}  // namespace

TEST_CASE("Clopper-Pearson upper bound") {
    // closed form at zero successes
    CHECK(clopper_pearson_upper(0, 100, 0.99) ==
          doctest::Approx(1.0 - std::pow(0.01, 1.0 / 100.0)).epsilon(1e-10));
    CHECK(clopper_pearson_upper(50, 50, 0.99) == 1.0);
    for (auto [x, n] : {std::pair<std::int64_t, std::int64_t>{3, 50}, {1, 20}, {10, 40}}) {
        CHECK(clopper_pearson_upper(x, n, 0.99) ==
              doctest::Approx(cp_upper_by_binomial_sum(x, n, 0.99)).epsilon(1e-8));
    }
    // monotone in successes
    CHECK(clopper_pearson_upper(2, 100, 0.99) < clopper_pearson_upper(3, 100, 0.99));
}

TEST_CASE("line fit recovers exact slopes") {
    std::vector<double> x{1.0, 2.0, 3.0, 4.0};
    std::vector<double> y;
    for (double v : x) y.push_back(-2.0 * v + 0.5);
    const auto f = fit_line(x, y);
    CHECK(f.slope == doctest::Approx(-2.0).epsilon(1e-13));
    CHECK(f.intercept == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("overflow guards raise range errors naming the constant") {
    CHECK_THROWS_WITH_AS(guarded_exp(800.0, "C_31"), doctest::Contains("C_31"), std::range_error);
    CHECK_THROWS_AS(guard_finite(std::numeric_limits<double>::infinity(), "K_1m"), std::range_error);
    CHECK(guard_finite(3.0, "x") == 3.0);
}
