#pragma once

#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>

#include "mlmc/model.hpp"

namespace mlmc {

// Refinement factor m in {2, 3, ...} or the distinguished infinite value.
// Ratio expressions branch to their limits at infinity: (m-1)/m -> 1,
// (2m-1)/m -> 2, m/(m-1) -> 1.
class LevelFactor {
  public:
    static LevelFactor finite(int m);
    static LevelFactor infinite();

    bool is_infinite() const { return infinite_; }
    int value() const;  // throws for the infinite factor
    double as_double() const;

    double frac_m_minus_1_over_m() const { return infinite_ ? 1.0 : (m_ - 1.0) / m_; }
    double frac_2m_minus_1_over_m() const { return infinite_ ? 2.0 : (2.0 * m_ - 1.0) / m_; }

    bool operator==(const LevelFactor& o) const { return infinite_ == o.infinite_ && m_ == o.m_; }

  private:
    LevelFactor(bool inf, int m) : infinite_(inf), m_(m) {}
    bool infinite_ = false;
    int m_ = 2;
};

// Every explicit constant of the error analysis, evaluated as a pure function
// of (problem, payoff, m). Scalar keys follow the library's stable naming
// (C_9, K_1m, rho_17, C_50, c1..c7, ...) also used by the CLI JSON dump.
//
// All evaluators are pure and safe for concurrent use; the two heavyweight
// members (C50, script_C) are computed once behind a call_once latch.
class ConstantsBundle {
  public:
    ConstantsBundle(ProblemSpec problem, LevelFactor m, double rho42_cap = 1e12,
                    int sup_grid_points = 4096);
    ConstantsBundle(ProblemSpec problem, Payoff payoff, LevelFactor m, double rho42_cap = 1e12,
                    int sup_grid_points = 4096);

    const ProblemSpec& problem() const { return problem_; }
    const Payoff& payoff() const;
    LevelFactor m() const { return m_; }

    // ---- strong error of the coupled Euler pair ----
    double C9() const { return C9_; }
    double K1m() const { return K1m_; }
    double K2m() const { return K2m_; }
    double K1_inf() const { return K1inf_; }
    double K2_inf() const { return K2inf_; }
    double C31() const { return C31_; }

    // ---- MGF of the squared coupled max gap ----
    // largest admissible rho is rho17() * n^2
    double rho17() const { return rho17_; }
    double C18(double x) const;
    double mgf_gap_bound(double rho, std::int64_t n, double x) const;  // RHS of the gap MGF bound

    // ---- Malliavin coupled-gap constants ----
    double C39() const { return C39_; }
    double rho41() const { return rho41_; }
    double rho42() const { return rho42_; }
    double C42() const { return C42_; }
    double Phi1(double r) const;
    double Phi2(double r) const;
    double Phi3(double r) const;
    double inv_sqrt_rho_hat(double r) const;  // Phi1/sqrt(rho17)+Phi2/sqrt(rho41)+Phi3/sqrt(rho42)
    double rho_hat(double r) const;           // rejects r >= T
    double phi2(double r, double x) const;
    double Phi(double r, double x) const;     // rejects r >= T
    double malliavin_rho_max(double r, std::int64_t n) const;
    double malliavin_mgf_bound(double rho, double r, std::int64_t n) const;

    // ---- estimator MGF constants (payoff required) ----
    double C50() const;
    double script_C() const;

    // ---- sample-allocation and deviation constants (finite m required) ----
    double C13() const;
    double gamma1() const;  // m(sqrt(m)-1)C13/(m+1), the recurring cost-shape group
    double c1() const;
    double c2() const;
    double c3() const;
    double c4() const;
    double c5(double eps, double beta) const;
    double c6() const;
    double c6_prime() const;
    double c7() const;
    double C22(int L) const;

  private:
    void init_drift_constants();
    void ensure_payoff_constants() const;
    double strong_error_sqrt(LevelFactor m, double scheme_constant) const;

    ProblemSpec problem_;
    std::optional<Payoff> payoff_;
    LevelFactor m_;
    double rho42_cap_;
    int sup_grid_points_;

    double C9_ = 0.0, K1m_ = 0.0, K2m_ = 0.0, K1inf_ = 0.0, K2inf_ = 0.0, C31_ = 0.0;
    double rho17_ = 0.0;
    double C39_ = 0.0, rho41_ = 0.0, rho42_ = 0.0, C42_ = 0.0;

    mutable std::once_flag heavy_once_;
    mutable double C50_ = 0.0;
    mutable double scriptC_ = 0.0;
};

// Operation-shaped wrappers over the bundle.
struct StrongErrorConstants {
    double C9, K1m, K2m, C31;
};
StrongErrorConstants strong_error_constants(const ProblemSpec& problem, LevelFactor m);

struct MgfThreshold {
    double rho_max;  // rho17 * n^2
    std::function<double(double)> C18;
};
MgfThreshold mgf_threshold(const ProblemSpec& problem, LevelFactor m, std::int64_t n);

struct DeviationConstants {
    double c1, c2, c3, c4, c5_of_eps, c6, c6_prime, c7, C13;
    double C22_at_L0;
    bool eps_below_c1;  // the optimal-parameter tail guarantees hold only for eps < c1
};
DeviationConstants deviation_constants(const ConstantsBundle& bundle, double eps, double beta);

}  // namespace mlmc
