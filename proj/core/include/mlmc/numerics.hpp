#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace mlmc {

// Globally adaptive quadrature on [a, b] built on a Gauss 7/15 pair. Panels
// with the largest error estimate are bisected until the total estimated
// error is below max(abs_tol, rel_tol * |I|). Throws std::runtime_error
// naming the achieved tolerance when the panel budget is exhausted.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-10, double abs_tol = 1e-12);

// Bisection root finder on [lo, hi]; requires f(lo) and f(hi) of opposite
// sign (zero endpoints accepted). Relative tolerance on the bracket width.
double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                   double rel_tol = 1e-12);

// Golden-section maximizer for a unimodal function; returns the argmax.
double golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                          double tol = 1e-10);

// Regularized incomplete beta I_x(a, b) via the Lentz continued fraction.
double reg_incomplete_beta(double a, double b, double x);

// One-sided Clopper-Pearson upper confidence bound for a binomial proportion.
double clopper_pearson_upper(std::int64_t successes, std::int64_t trials, double confidence);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// exp with a guard: values whose magnitude would exceed ~1e300 raise
// std::range_error naming `label`.
double guarded_exp(double arg, const char* label);

// Raises std::range_error naming `label` if v is not finite or |v| > 1e300.
double guard_finite(double v, const char* label);

}  // namespace mlmc
