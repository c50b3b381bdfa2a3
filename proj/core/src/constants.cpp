#include "mlmc/constants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <stdexcept>

#include "mlmc/numerics.hpp"

namespace mlmc {

namespace {
constexpr double kLn2 = std::numbers::ln2;
const double kSqrtPi = std::sqrt(std::numbers::pi);

// Bound values saturate at the 1e300 guard instead of throwing: a saturated
// value is still a valid (conservative) upper bound, and degenerate declared
// constants (e.g. a vanishing drift) legitimately push the exact bound out of
// double range while the checked quantity is trivially small.
double saturating_exp(double arg) { return arg > 690.0 ? 1e300 : std::exp(arg); }
}  // namespace

LevelFactor LevelFactor::finite(int m) {
    if (m < 2) throw std::invalid_argument("LevelFactor: m >= 2 required");
    return LevelFactor(false, m);
}

LevelFactor LevelFactor::infinite() { return LevelFactor(true, 0); }

int LevelFactor::value() const {
    if (infinite_) throw std::domain_error("LevelFactor: finite m required");
    return m_;
}

double LevelFactor::as_double() const {
    return infinite_ ? std::numeric_limits<double>::infinity() : static_cast<double>(m_);
}

ConstantsBundle::ConstantsBundle(ProblemSpec problem, LevelFactor m, double rho42_cap,
                                 int sup_grid_points)
    : problem_(std::move(problem)), m_(m), rho42_cap_(rho42_cap), sup_grid_points_(sup_grid_points) {
    init_drift_constants();
}

ConstantsBundle::ConstantsBundle(ProblemSpec problem, Payoff payoff, LevelFactor m, double rho42_cap,
                                 int sup_grid_points)
    : problem_(std::move(problem)),
      payoff_(std::move(payoff)),
      m_(m),
      rho42_cap_(rho42_cap),
      sup_grid_points_(sup_grid_points) {
    if (payoff_->dim() != problem_.d)
        throw std::invalid_argument("ConstantsBundle: payoff dimension mismatch");
    init_drift_constants();
}

const Payoff& ConstantsBundle::payoff() const {
    if (!payoff_) throw std::domain_error("ConstantsBundle: payoff required for this constant");
    return *payoff_;
}

double ConstantsBundle::strong_error_sqrt(LevelFactor m, double scheme_constant) const {
    const double b = problem_.drift.lip_grad();
    const double a_lap = problem_.drift.lap_growth();
    const double b0 = problem_.b_norm_at_x0();
    const double T = problem_.T;
    const double d = static_cast<double>(problem_.d);
    const double r1 = m.frac_m_minus_1_over_m();
    const double r2 = m.frac_2m_minus_1_over_m();
    // (bT - 1 + e^{-bT}) and (1 - e^{-bT}) via expm1 so tiny b stays accurate
    const double em1 = std::expm1(-b * T);
    const double drift_term =
        (b0 / 2.0) * (a_lap * (b * T + em1) / (2.0 * b * b) + b * T) + a_lap * (-em1) / b +
        (2.0 / 3.0) * std::sqrt(d) * (b * b + a_lap) * std::pow(T, 1.5);
    const double s = scheme_constant * b * std::sqrt(d * r2 / 6.0) +
                     std::exp(b * T) * std::sqrt(r1) * drift_term;
    return guard_finite(s, "K_1m");
}

void ConstantsBundle::init_drift_constants() {
    const double b = problem_.drift.lip_grad();
    const double a_lap = problem_.drift.lap_growth();
    const double hess = problem_.drift.hess_bound();
    const double a_glap = problem_.drift.grad_lap_growth();
    const double T = problem_.T;
    const double d = static_cast<double>(problem_.d);

    const double integral = integrate([&](double t) { return std::exp(b * (T - t)) * std::sqrt(t); },
                                      0.0, T, 1e-10, 1e-13);
    C9_ = std::sqrt(T) + b * integral;
    C31_ = guard_finite(std::exp(T * b) * (b * b + a_lap), "C_31");

    const double k1s = strong_error_sqrt(m_, C9_);
    const double k2s = strong_error_sqrt(m_, C9_ + std::sqrt(T));
    K1m_ = guard_finite(k1s * k1s, "K_1m");
    K2m_ = guard_finite(k2s * k2s, "K_2m");
    const double k1si = strong_error_sqrt(LevelFactor::infinite(), C9_);
    const double k2si = strong_error_sqrt(LevelFactor::infinite(), C9_ + std::sqrt(T));
    K1inf_ = k1si * k1si;
    K2inf_ = k2si * k2si;

    const double r1 = m_.frac_m_minus_1_over_m();
    const double r2 = m_.frac_2m_minus_1_over_m();
    const double A = C9_ * b * std::sqrt(3.0 * d * r2);
    const double B = C31_ * std::pow(T, 1.5) * std::sqrt(2.0 * r1);
    rho17_ = guard_finite(9.0 / (4.0 * T * T * r1 * (A + B) * (A + B)), "rho_17");

    C39_ = std::max(std::sqrt(d) * b * hess, b * b) + a_glap;
    rho41_ = guard_finite(1.0 / (2.0 * C39_ * C39_ * T * T * r1 * r1), "rho_41");
    const double rho42_raw = 3.0 / (4.0 * T * T * d * hess * hess * r2 * r1);
    rho42_ = std::min(rho42_raw, rho42_cap_);
    C42_ = (2.0 / 3.0) * kLn2 * d * hess * hess * r2;
}

double ConstantsBundle::C18(double x) const {
    if (x < 0.0) throw std::invalid_argument("C18: x >= 0 required");
    const double b = problem_.drift.lip_grad();
    const double a_lap = problem_.drift.lap_growth();
    const double b0 = problem_.b_norm_at_x0();
    const double T = problem_.T;
    const double d = static_cast<double>(problem_.d);
    const double r1 = m_.frac_m_minus_1_over_m();
    const double r2 = m_.frac_2m_minus_1_over_m();

    const double x_tilde = b * std::exp(-b * T) * x / (b * b + a_lap);
    const double core = b0 + b + x_tilde;
    const double A = C9_ * b * std::sqrt(3.0 * d * r2);
    const double B = C31_ * std::pow(T, 1.5) * std::sqrt(2.0 * r1);
    const double inner = C9_ * b * (2.0 * kLn2 / (3.0 * std::sqrt(3.0))) * std::sqrt(d * r2) +
                         C31_ * std::sqrt(r1 * T / 2.0) *
                             ((3.0 * d + 1.0) * core * core / (4.0 * b * b) +
                              4.0 * d * std::sqrt(T) * core / (3.0 * kSqrtPi * b) +
                              4.0 * d * T * kLn2 / 9.0);
    return guard_finite((A + B) * inner, "C_18");
}

double ConstantsBundle::mgf_gap_bound(double rho, std::int64_t n, double x) const {
    if (n < 1) throw std::invalid_argument("mgf_gap_bound: n >= 1 required");
    const double nn = static_cast<double>(n);
    if (rho < 0.0 || rho > rho17_ * nn * nn * (1.0 + 1e-12))
        throw std::domain_error("mgf_gap_bound: rho above the admissible threshold");
    const double T = problem_.T;
    const double r1 = m_.frac_m_minus_1_over_m();
    return saturating_exp(rho * C18(x) * r1 * T * T / (nn * nn));
}

double ConstantsBundle::Phi1(double r) const {
    if (r < 0.0 || r > problem_.T) throw std::domain_error("Phi1: r in [0, T] required");
    const double b = problem_.drift.lip_grad();
    const double hess = problem_.drift.hess_bound();
    return std::sqrt(static_cast<double>(problem_.d)) * hess * std::expm1(b * (problem_.T - r)) / b;
}

double ConstantsBundle::Phi2(double r) const {
    if (r < 0.0 || r > problem_.T) throw std::domain_error("Phi2: r in [0, T] required");
    const double b = problem_.drift.lip_grad();
    if (r == problem_.T) return 0.0;
    return integrate([&](double s) { return std::exp(b * s) * std::sqrt(s); }, r, problem_.T, 1e-11,
                     1e-14);
}

double ConstantsBundle::Phi3(double r) const {
    if (r < 0.0 || r > problem_.T) throw std::domain_error("Phi3: r in [0, T] required");
    const double b = problem_.drift.lip_grad();
    const double T = problem_.T;
    const double head = std::sqrt(-std::expm1(-2.0 * b * (T - r)) / (2.0 * b));
    if (r == T) return 0.0;
    const double tail = std::sqrt(b / 2.0) *
                        integrate([&](double t) { return std::sqrt(-std::expm1(-2.0 * b * (t - r))); },
                                  r, T, 1e-11, 1e-14);
    return head + tail;
}

double ConstantsBundle::inv_sqrt_rho_hat(double r) const {
    return Phi1(r) / std::sqrt(rho17_) + Phi2(r) / std::sqrt(rho41_) + Phi3(r) / std::sqrt(rho42_);
}

double ConstantsBundle::rho_hat(double r) const {
    if (!(r < problem_.T)) throw std::domain_error("rho_hat: r in [0, T) required");
    const double inv = inv_sqrt_rho_hat(r);
    return guard_finite(1.0 / (inv * inv), "rho_hat");
}

double ConstantsBundle::phi2(double r, double x) const {
    if (r < 0.0 || r > problem_.T) throw std::domain_error("phi2: r in [0, T] required");
    const double b = problem_.drift.lip_grad();
    const double b0 = problem_.b_norm_at_x0();
    const double T = problem_.T;
    const double d = static_cast<double>(problem_.d);
    const double r1 = m_.frac_m_minus_1_over_m();
    // e^{bT} - e^{br} evaluated as e^{br} expm1(b(T-r))
    const double egap = std::exp(b * r) * std::expm1(b * (T - r));
    const double core = C39_ * (b0 + b) / (2.0 * b * b) * egap + x;
    const double p2 = Phi2(r);
    const double v = r1 * ((3.0 * d + 1.0) * core * core + (4.0 * d * C39_ * p2 / kSqrtPi) * core +
                           d * kLn2 * C39_ * C39_ * p2 * p2);
    return guard_finite(v, "phi_2");
}

double ConstantsBundle::Phi(double r, double x) const {
    if (!(r < problem_.T)) throw std::domain_error("Phi: r in [0, T) required");
    // with u = Phi1/sqrt(rho17), v = Phi2/sqrt(rho41), w = Phi3/sqrt(rho42):
    // Phi = (u+v+w) (Phi3 sqrt(rho42) C42 + phi2 sqrt(rho41)/Phi2 + Phi1 sqrt(rho17) C18(0))
    const double p1 = Phi1(r), p2 = Phi2(r), p3 = Phi3(r);
    const double u = p1 / std::sqrt(rho17_);
    const double v = p2 / std::sqrt(rho41_);
    const double w = p3 / std::sqrt(rho42_);
    const double val = (u + v + w) * (p3 * std::sqrt(rho42_) * C42_ + phi2(r, x) * std::sqrt(rho41_) / p2 +
                                      p1 * std::sqrt(rho17_) * C18(0.0));
    return guard_finite(val, "Phi");
}

double ConstantsBundle::malliavin_rho_max(double r, std::int64_t n) const {
    if (n < 1) throw std::invalid_argument("malliavin_rho_max: n >= 1 required");
    const double b = problem_.drift.lip_grad();
    const double nn = static_cast<double>(n);
    return std::exp(-2.0 * b * (problem_.T - r)) * rho_hat(r) * nn * nn;
}

double ConstantsBundle::malliavin_mgf_bound(double rho, double r, std::int64_t n) const {
    if (rho < 0.0 || rho > malliavin_rho_max(r, n) * (1.0 + 1e-12))
        throw std::domain_error("malliavin_mgf_bound: rho above the admissible threshold");
    const double b = problem_.drift.lip_grad();
    const double T = problem_.T;
    const double nn = static_cast<double>(n);
    const double r1 = m_.frac_m_minus_1_over_m();
    return saturating_exp(rho * std::exp(2.0 * b * (T - r)) * Phi(r, problem_.drift.lip_grad()) * r1 *
                          T * T / (nn * nn));
}

void ConstantsBundle::ensure_payoff_constants() const {
    std::call_once(heavy_once_, [this]() {
        const Payoff& f = payoff();
        const double fl = f.grad_lip();
        const double fi = f.lip();
        const double T = problem_.T;
        const double b = problem_.drift.lip_grad();
        const double d = static_cast<double>(problem_.d);
        const double sr17 = std::sqrt(rho17_);

        // J50 = int_0^T e^{2b(T-t)} (sqrt(rho17)/sqrt(rho_hat(t)) + fl/fi)^2 dt,
        // written through inv_sqrt_rho_hat so the integrand is continuous at T.
        const double J50 = integrate(
            [&](double t) {
                const double g = sr17 * inv_sqrt_rho_hat(t) + fl / fi;
                return std::exp(2.0 * b * (T - t)) * g * g;
            },
            0.0, T, 1e-10, 1e-13);

        // sup over r in [0,T) of
        //   (fl sqrt(rho_hat) C18(xbar) + fi rho_hat Phi(r,0)/sqrt(rho17))
        //   / (fi sqrt(rho17) + fl sqrt(rho_hat))
        // evaluated in the form multiplied through by 1/sqrt(rho_hat); the
        // r -> T limit is C18(xbar).
        const double xbar = 2.0 * b * fi / (T * fl);
        const double C18xbar = C18(xbar);
        auto sup_fn = [&](double r) {
            const double inv = inv_sqrt_rho_hat(r);
            const double num = fl * C18xbar + fi * (Phi(r, 0.0) / inv) / sr17;
            const double den = fi * sr17 * inv + fl;
            return num / den;
        };
        const double r_hi = T * (1.0 - std::pow(2.0, -20.0));
        const int N = sup_grid_points_;
        double best = C18xbar;  // analytic r -> T limit
        int best_i = -1;
        for (int i = 0; i < N; ++i) {
            const double r = r_hi * static_cast<double>(i) / (N - 1);
            const double s = sup_fn(r);
            if (s > best) {
                best = s;
                best_i = i;
            }
        }
        if (best_i >= 0) {
            const double lo = r_hi * static_cast<double>(std::max(0, best_i - 1)) / (N - 1);
            const double hi = r_hi * static_cast<double>(std::min(N - 1, best_i + 1)) / (N - 1);
            const double r_star = golden_section_max(sup_fn, lo, hi, 1e-12);
            best = std::max(best, sup_fn(r_star));
        }

        C50_ = guard_finite(d * T * J50 * best, "C_50");
        if (!m_.is_infinite()) {
            const double mm = m_.as_double();
            scriptC_ = guard_finite(
                std::sqrt(rho17_ / (2.0 * d * mm * mm * T * fi * fi * J50)), "script_C");
        } else {
            scriptC_ = 0.0;
        }
    });
}

double ConstantsBundle::C50() const {
    ensure_payoff_constants();
    return C50_;
}

double ConstantsBundle::script_C() const {
    if (m_.is_infinite()) throw std::domain_error("script_C: finite m required");
    ensure_payoff_constants();
    return scriptC_;
}

double ConstantsBundle::C13() const {
    const double mm = static_cast<double>(m_.value());
    return (1.0 / mm) * std::sqrt((mm + 1.0) / (K1m_ * (mm - 1.0) * problem_.T));
}

double ConstantsBundle::gamma1() const {
    const double mm = static_cast<double>(m_.value());
    return mm * (std::sqrt(mm) - 1.0) * C13() / (mm + 1.0);
}

double ConstantsBundle::c1() const {
    return payoff().lip() * problem_.T * std::sqrt(K1inf_) * std::sqrt(1.0 + 2.0 * gamma1());
}

double ConstantsBundle::c2() const {
    const double fi = payoff().lip();
    const double T = problem_.T;
    const double mm = static_cast<double>(m_.value());
    const double bias_scale = fi * T * std::sqrt(K1inf_);
    return script_C() * fi * fi * T /
           (std::cbrt(2.0) * C13() * std::sqrt(mm) * std::pow(bias_scale, 2.0 / 3.0) *
            std::cbrt(1.0 + gamma1()));
}

double ConstantsBundle::c3() const { return std::max(4.0, 8.0 * C50() / K1m_); }

double ConstantsBundle::c4() const {
    const double fi = payoff().lip();
    const double T = problem_.T;
    const double mm = static_cast<double>(m_.value());
    const double g = gamma1();
    const double bias_scale = fi * T * std::sqrt(K1inf_);
    const double inner = mm / ((1.0 + g) * std::cbrt(bias_scale)) *
                         (std::cbrt(1.0 + g) / std::pow(2.0, 2.0 / 3.0) +
                          std::cbrt(1.0 + 2.0 * g) / (1.0 + 4.0 * g));
    return (2.0 / c3()) * inner * inner;
}

double ConstantsBundle::c5(double eps, double beta) const {
    if (!(eps > 0.0)) throw std::invalid_argument("c5: eps > 0 required");
    if (!(beta > 1.0)) throw std::invalid_argument("c5: beta > 1 required");
    const double fi = payoff().lip();
    const double T = problem_.T;
    const double mm = static_cast<double>(m_.value());
    const double g = gamma1();
    const double log_arg = fi * T * std::sqrt(2.0 * K1inf_ * (1.0 + g)) / eps;
    const double base = 1.0 + 4.0 / (3.0 * std::log(mm)) * std::log(log_arg);
    return script_C() * fi * fi * T / (C13() * std::sqrt(mm)) * std::pow(base, -beta);
}

double ConstantsBundle::c6() const {
    return std::sqrt((3.0 + std::sqrt(3.0)) / 4.0 * std::max(1.0, 2.0 * C50() / K1m_));
}

double ConstantsBundle::c6_prime() const { return std::sqrt(std::min(0.5, C50() / K1m_)); }

double ConstantsBundle::c7() const {
    const double fi = payoff().lip();
    const double T = problem_.T;
    const double mm = static_cast<double>(m_.value());
    return script_C() * C13() * K1m_ * std::pow(mm, 1.5) * (mm - 1.0) * std::pow(fi * T, 4.0 / 3.0) /
           (std::cbrt(2.0) * (mm + 1.0) * std::cbrt(K1inf_) * std::cbrt(1.0 + gamma1()));
}

double ConstantsBundle::C22(int L) const {
    if (L < 0) throw std::invalid_argument("C22: L >= 0 required");
    const double fi = payoff().lip();
    const double T = problem_.T;
    const double b = problem_.drift.lip_grad();
    const double M = std::pow(static_cast<double>(m_.value()), L);
    // sum_{k=1}^{M} e^{2b(T - Tk/M)} = expm1(2bT)/expm1(2bT/M), geometric form
    const double sum = std::expm1(2.0 * b * T) / std::expm1(2.0 * b * T / M);
    return guard_finite(T * fi * fi / (2.0 * M) * sum, "C_22");
}

StrongErrorConstants strong_error_constants(const ProblemSpec& problem, LevelFactor m) {
    ConstantsBundle k(problem, m);
    return {k.C9(), k.K1m(), k.K2m(), k.C31()};
}

MgfThreshold mgf_threshold(const ProblemSpec& problem, LevelFactor m, std::int64_t n) {
    if (n < 1) throw std::invalid_argument("mgf_threshold: n >= 1 required");
    auto k = std::make_shared<ConstantsBundle>(problem, m);
    MgfThreshold out;
    out.rho_max = k->rho17() * static_cast<double>(n) * static_cast<double>(n);
    out.C18 = [k](double x) { return k->C18(x); };
    return out;
}

DeviationConstants deviation_constants(const ConstantsBundle& bundle, double eps, double beta) {
    if (!(eps > 0.0)) throw std::invalid_argument("deviation_constants: eps > 0 required");
    DeviationConstants dc;
    dc.c1 = bundle.c1();
    dc.c2 = bundle.c2();
    dc.c3 = bundle.c3();
    dc.c4 = bundle.c4();
    dc.c5_of_eps = bundle.c5(eps, beta);
    dc.c6 = bundle.c6();
    dc.c6_prime = bundle.c6_prime();
    dc.c7 = bundle.c7();
    dc.C13 = bundle.C13();
    dc.C22_at_L0 = bundle.C22(0);
    dc.eps_below_c1 = eps < dc.c1;
    return dc;
}

}  // namespace mlmc
