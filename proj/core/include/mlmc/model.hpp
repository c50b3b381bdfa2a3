#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mlmc/linalg.hpp"

namespace mlmc {

// Drift b of dX = b(X)dt + dW together with its declared regularity
// constants: lip_grad bounds ||grad b||, lap_growth the affine growth of
// |lap b|, hess_bound the column blocks of the Hessian, grad_lap_growth the
// affine growth of ||grad lap b||. The built-in families carry the tightest
// analytic values; truly vanishing curvature gets a small positive default
// because downstream formulas require strictly positive bounds.
class DriftModel {
  public:
    enum class Kind { Constant, Affine, SmoothSine, Custom };

    // b(x) = c
    static DriftModel constant(Vec c, double lip_grad_floor = kTinyBound);
    // b(x) = A x + c
    static DriftModel affine(Mat A, Vec c, double hess_bound_floor = kTinyBound);
    // b_i(x) = amplitude * sin(x_i)
    static DriftModel smooth_sine(int dim, double amplitude);
    // user-supplied evaluators; any of laplacian / grad_laplacian may be null
    static DriftModel custom(int dim, std::function<Vec(const Vec&)> b,
                             std::function<Mat(const Vec&)> grad,
                             std::function<Vec(const Vec&)> laplacian,
                             std::function<Mat(const Vec&)> grad_laplacian, double lip_grad,
                             double lap_growth, double hess_bound, double grad_lap_growth);

    static constexpr double kTinyBound = 1e-8;

    Kind kind() const { return kind_; }
    int dim() const { return dim_; }

    Vec value(const Vec& x) const;
    Mat jacobian(const Vec& x) const;
    Vec laplacian(const Vec& x) const;
    Mat laplacian_jacobian(const Vec& x) const;

    bool has_laplacian() const;
    bool has_laplacian_jacobian() const;

    // cheap in-place evaluation for the simulation hot path
    void value_into(const double* x, double* out) const;

    double lip_grad() const { return lip_grad_; }
    double lap_growth() const { return lap_growth_; }
    double hess_bound() const { return hess_bound_; }
    double grad_lap_growth() const { return grad_lap_growth_; }

    void set_lip_grad(double v);
    void set_lap_growth(double v);
    void set_hess_bound(double v);
    void set_grad_lap_growth(double v);

    const Mat& affine_matrix() const;
    const Vec& offset() const;
    double amplitude() const { return amplitude_; }

  private:
    DriftModel() = default;
    void check_dim(const Vec& x) const;

    Kind kind_ = Kind::Constant;
    int dim_ = 0;
    Mat A_;
    Vec c_;
    double amplitude_ = 0.0;
    std::function<Vec(const Vec&)> b_fn_;
    std::function<Mat(const Vec&)> grad_fn_;
    std::function<Vec(const Vec&)> lap_fn_;
    std::function<Mat(const Vec&)> grad_lap_fn_;
    double lip_grad_ = 0.0;
    double lap_growth_ = 0.0;
    double hess_bound_ = 0.0;
    double grad_lap_growth_ = 0.0;
};

// Test function f with Lipschitz constant lip and gradient-Lipschitz constant
// grad_lip. A linear payoff has grad-Lipschitz constant 0; any positive value
// is admissible, and the registry defaults grad_lip = lip so the same object
// serves every consumer (callers that do not need grad_lip ignore it).
class Payoff {
  public:
    enum class Kind { Linear, SquaredNorm, Custom };

    // lip defaults to |u| (the tight constant); any override must be >= |u|
    static Payoff linear(Vec u, double offset = 0.0,
                         std::optional<double> grad_lip_override = std::nullopt,
                         std::optional<double> lip_override = std::nullopt);
    // f(x) = |x|^2; not globally Lipschitz, intended for oracle plumbing only
    static Payoff squared_norm(int dim, double lip_for_checks);
    static Payoff custom(int dim, std::function<double(const Vec&)> f,
                         std::function<Vec(const Vec&)> grad, double lip, double grad_lip);

    Kind kind() const { return kind_; }
    int dim() const { return dim_; }
    double operator()(const Vec& x) const;
    Vec gradient(const Vec& x) const;
    double lip() const { return lip_; }
    double grad_lip() const { return grad_lip_; }
    const Vec& linear_coeff() const;
    double linear_offset() const { return offset_; }

  private:
    Payoff() = default;

    Kind kind_ = Kind::Linear;
    int dim_ = 0;
    Vec u_;
    double offset_ = 0.0;
    std::function<double(const Vec&)> f_fn_;
    std::function<Vec(const Vec&)> grad_fn_;
    double lip_ = 0.0;
    double grad_lip_ = 0.0;
};

// The SDE instance dX = b(X)dt + dW, X_0 = x0, on [0, T].
struct ProblemSpec {
    int d = 1;
    Vec x0;
    double T = 1.0;
    DriftModel drift;

    ProblemSpec(Vec x0_in, double T_in, DriftModel drift_in);

    // |b(x0)|, cached at construction
    double b_norm_at_x0() const { return b_norm_at_x0_; }

  private:
    double b_norm_at_x0_ = 0.0;
};

struct AssumptionRatio {
    std::string inequality;  // which declared bound is being exercised
    double max_ratio = 0.0;  // worst observed/allowed, <= 1 means satisfied
    Vec worst_point;
};

struct AssumptionReport {
    std::vector<AssumptionRatio> ratios;
    std::vector<std::string> violations;  // empty iff all ratios <= 1
    std::int64_t samples = 0;
    bool ok() const { return violations.empty(); }
};

// Samples points uniformly in the ball of `radius` around x0 and reports the
// worst observed/allowed ratio for every declared inequality, plus a
// finite-difference check of the analytic Jacobian. Report-only.
AssumptionReport validate_assumptions(const ProblemSpec& problem, std::int64_t n_samples = 10000,
                                      double radius = 10.0, std::uint64_t seed = 1234);

}  // namespace mlmc
