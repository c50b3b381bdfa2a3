#include "mlmc/model.hpp"

#include <cmath>
#include <stdexcept>

#include "mlmc/rng.hpp"

namespace mlmc {

namespace {

void require_positive(double v, const char* what) {
    if (!(v > 0.0)) throw std::invalid_argument(std::string(what) + " must be strictly positive");
}

void require_non_negative(double v, const char* what) {
    if (!(v >= 0.0)) throw std::invalid_argument(std::string(what) + " must be non-negative");
}

}  // namespace

DriftModel DriftModel::constant(Vec c, double lip_grad_floor) {
    require_positive(lip_grad_floor, "lip_grad floor");
    DriftModel m;
    m.kind_ = Kind::Constant;
    m.dim_ = static_cast<int>(c.size());
    m.c_ = std::move(c);
    m.lip_grad_ = lip_grad_floor;
    m.lap_growth_ = 0.0;
    m.hess_bound_ = kTinyBound;
    m.grad_lap_growth_ = 0.0;
    return m;
}

DriftModel DriftModel::affine(Mat A, Vec c, double hess_bound_floor) {
    if (A.rows != A.cols || A.rows != static_cast<int>(c.size()))
        throw std::invalid_argument("affine drift: A must be square and match c");
    require_positive(hess_bound_floor, "hess_bound floor");
    DriftModel m;
    m.kind_ = Kind::Affine;
    m.dim_ = A.rows;
    m.lip_grad_ = std::max(operator_norm(A), kTinyBound);
    m.A_ = std::move(A);
    m.c_ = std::move(c);
    m.lap_growth_ = 0.0;
    m.hess_bound_ = hess_bound_floor;
    m.grad_lap_growth_ = 0.0;
    return m;
}

DriftModel DriftModel::smooth_sine(int dim, double amplitude) {
    if (dim < 1) throw std::invalid_argument("smooth_sine: dim >= 1 required");
    if (amplitude == 0.0) throw std::invalid_argument("smooth_sine: amplitude must be non-zero");
    DriftModel m;
    m.kind_ = Kind::SmoothSine;
    m.dim_ = dim;
    m.amplitude_ = amplitude;
    const double a = std::fabs(amplitude);
    m.lip_grad_ = a;
    m.lap_growth_ = a * std::sqrt(static_cast<double>(dim)) / 2.0;
    m.hess_bound_ = a;
    m.grad_lap_growth_ = a * std::sqrt(static_cast<double>(dim)) / 2.0;
    return m;
}

DriftModel DriftModel::custom(int dim, std::function<Vec(const Vec&)> b,
                              std::function<Mat(const Vec&)> grad,
                              std::function<Vec(const Vec&)> laplacian,
                              std::function<Mat(const Vec&)> grad_laplacian, double lip_grad,
                              double lap_growth, double hess_bound, double grad_lap_growth) {
    if (dim < 1) throw std::invalid_argument("custom drift: dim >= 1 required");
    if (!b || !grad) throw std::invalid_argument("custom drift: b and grad evaluators required");
    require_positive(lip_grad, "lip_grad");
    require_non_negative(lap_growth, "lap_growth");
    require_positive(hess_bound, "hess_bound");
    require_non_negative(grad_lap_growth, "grad_lap_growth");
    DriftModel m;
    m.kind_ = Kind::Custom;
    m.dim_ = dim;
    m.b_fn_ = std::move(b);
    m.grad_fn_ = std::move(grad);
    m.lap_fn_ = std::move(laplacian);
    m.grad_lap_fn_ = std::move(grad_laplacian);
    m.lip_grad_ = lip_grad;
    m.lap_growth_ = lap_growth;
    m.hess_bound_ = hess_bound;
    m.grad_lap_growth_ = grad_lap_growth;
    return m;
}

void DriftModel::check_dim(const Vec& x) const {
    if (static_cast<int>(x.size()) != dim_)
        throw std::invalid_argument("drift evaluation: dimension mismatch");
}

Vec DriftModel::value(const Vec& x) const {
    check_dim(x);
    Vec out(dim_);
    value_into(x.data(), out.data());
    return out;
}

void DriftModel::value_into(const double* x, double* out) const {
    switch (kind_) {
        case Kind::Constant:
            for (int i = 0; i < dim_; ++i) out[i] = c_[i];
            return;
        case Kind::Affine:
            for (int i = 0; i < dim_; ++i) {
                double s = c_[i];
                const double* row = A_.a.data() + static_cast<size_t>(i) * dim_;
                for (int j = 0; j < dim_; ++j) s += row[j] * x[j];
                out[i] = s;
            }
            return;
        case Kind::SmoothSine:
            for (int i = 0; i < dim_; ++i) out[i] = amplitude_ * std::sin(x[i]);
            return;
        case Kind::Custom: {
            Vec xin(x, x + dim_);
            Vec v = b_fn_(xin);
            if (static_cast<int>(v.size()) != dim_)
                throw std::invalid_argument("custom drift returned wrong dimension");
            for (int i = 0; i < dim_; ++i) out[i] = v[i];
            return;
        }
    }
}

Mat DriftModel::jacobian(const Vec& x) const {
    check_dim(x);
    switch (kind_) {
        case Kind::Constant:
            return Mat(dim_, dim_, 0.0);
        case Kind::Affine:
            return A_;
        case Kind::SmoothSine: {
            Mat J(dim_, dim_);
            for (int i = 0; i < dim_; ++i) J(i, i) = amplitude_ * std::cos(x[i]);
            return J;
        }
        case Kind::Custom:
            return grad_fn_(x);
    }
    throw std::logic_error("unreachable");
}

Vec DriftModel::laplacian(const Vec& x) const {
    check_dim(x);
    switch (kind_) {
        case Kind::Constant:
        case Kind::Affine:
            return Vec(dim_, 0.0);
        case Kind::SmoothSine: {
            Vec v(dim_);
            for (int i = 0; i < dim_; ++i) v[i] = -amplitude_ * std::sin(x[i]);
            return v;
        }
        case Kind::Custom:
            if (!lap_fn_) throw std::domain_error("custom drift: laplacian evaluator not supplied");
            return lap_fn_(x);
    }
    throw std::logic_error("unreachable");
}

Mat DriftModel::laplacian_jacobian(const Vec& x) const {
    check_dim(x);
    switch (kind_) {
        case Kind::Constant:
        case Kind::Affine:
            return Mat(dim_, dim_, 0.0);
        case Kind::SmoothSine: {
            Mat J(dim_, dim_);
            for (int i = 0; i < dim_; ++i) J(i, i) = -amplitude_ * std::cos(x[i]);
            return J;
        }
        case Kind::Custom:
            if (!grad_lap_fn_)
                throw std::domain_error("custom drift: grad-laplacian evaluator not supplied");
            return grad_lap_fn_(x);
    }
    throw std::logic_error("unreachable");
}

bool DriftModel::has_laplacian() const { return kind_ != Kind::Custom || bool(lap_fn_); }
bool DriftModel::has_laplacian_jacobian() const { return kind_ != Kind::Custom || bool(grad_lap_fn_); }

void DriftModel::set_lip_grad(double v) {
    require_positive(v, "lip_grad");
    lip_grad_ = v;
}
void DriftModel::set_lap_growth(double v) {
    require_non_negative(v, "lap_growth");
    lap_growth_ = v;
}
void DriftModel::set_hess_bound(double v) {
    require_positive(v, "hess_bound");
    hess_bound_ = v;
}
void DriftModel::set_grad_lap_growth(double v) {
    require_non_negative(v, "grad_lap_growth");
    grad_lap_growth_ = v;
}

const Mat& DriftModel::affine_matrix() const {
    if (kind_ != Kind::Affine) throw std::domain_error("affine_matrix: drift is not affine");
    return A_;
}

const Vec& DriftModel::offset() const {
    if (kind_ != Kind::Affine && kind_ != Kind::Constant)
        throw std::domain_error("offset: drift has no offset vector");
    return c_;
}

Payoff Payoff::linear(Vec u, double offset, std::optional<double> grad_lip_override,
                      std::optional<double> lip_override) {
    Payoff p;
    p.kind_ = Kind::Linear;
    p.dim_ = static_cast<int>(u.size());
    p.lip_ = norm2(u);
    if (!(p.lip_ > 0.0)) throw std::invalid_argument("linear payoff: u must be non-zero");
    if (lip_override) {
        if (*lip_override < p.lip_)
            throw std::invalid_argument("linear payoff: lip override below |u| is not admissible");
        p.lip_ = *lip_override;
    }
    p.u_ = std::move(u);
    p.offset_ = offset;
    p.grad_lip_ = grad_lip_override.value_or(p.lip_);
    require_positive(p.grad_lip_, "grad_lip");
    return p;
}

Payoff Payoff::squared_norm(int dim, double lip_for_checks) {
    Payoff p;
    p.kind_ = Kind::SquaredNorm;
    p.dim_ = dim;
    require_positive(lip_for_checks, "lip");
    p.lip_ = lip_for_checks;
    p.grad_lip_ = 2.0;
    return p;
}

Payoff Payoff::custom(int dim, std::function<double(const Vec&)> f,
                      std::function<Vec(const Vec&)> grad, double lip, double grad_lip) {
    if (!f || !grad) throw std::invalid_argument("custom payoff: f and grad required");
    require_positive(lip, "lip");
    require_positive(grad_lip, "grad_lip");
    Payoff p;
    p.kind_ = Kind::Custom;
    p.dim_ = dim;
    p.f_fn_ = std::move(f);
    p.grad_fn_ = std::move(grad);
    p.lip_ = lip;
    p.grad_lip_ = grad_lip;
    return p;
}

double Payoff::operator()(const Vec& x) const {
    if (static_cast<int>(x.size()) != dim_)
        throw std::invalid_argument("payoff evaluation: dimension mismatch");
    switch (kind_) {
        case Kind::Linear:
            return dot(u_, x) + offset_;
        case Kind::SquaredNorm:
            return dot(x, x);
        case Kind::Custom:
            return f_fn_(x);
    }
    throw std::logic_error("unreachable");
}

Vec Payoff::gradient(const Vec& x) const {
    if (static_cast<int>(x.size()) != dim_)
        throw std::invalid_argument("payoff gradient: dimension mismatch");
    switch (kind_) {
        case Kind::Linear:
            return u_;
        case Kind::SquaredNorm:
            return 2.0 * x;
        case Kind::Custom:
            return grad_fn_(x);
    }
    throw std::logic_error("unreachable");
}

const Vec& Payoff::linear_coeff() const {
    if (kind_ != Kind::Linear) throw std::domain_error("linear_coeff: payoff is not linear");
    return u_;
}

ProblemSpec::ProblemSpec(Vec x0_in, double T_in, DriftModel drift_in)
    : d(static_cast<int>(x0_in.size())), x0(std::move(x0_in)), T(T_in), drift(std::move(drift_in)) {
    if (d < 1) throw std::invalid_argument("ProblemSpec: d >= 1 required");
    if (!(T > 0.0)) throw std::invalid_argument("ProblemSpec: T > 0 required");
    if (drift.dim() != d) throw std::invalid_argument("ProblemSpec: drift dimension mismatch");
    for (double c : x0)
        if (!std::isfinite(c)) throw std::invalid_argument("ProblemSpec: x0 must be finite");
    b_norm_at_x0_ = norm2(drift.value(x0));
}

AssumptionReport validate_assumptions(const ProblemSpec& problem, std::int64_t n_samples,
                                      double radius, std::uint64_t seed) {
    if (n_samples < 1) throw std::invalid_argument("validate_assumptions: n_samples >= 1");
    if (!(radius > 0.0)) throw std::invalid_argument("validate_assumptions: radius > 0");
    const DriftModel& b = problem.drift;
    const int d = problem.d;

    AssumptionReport rep;
    rep.samples = n_samples;
    AssumptionRatio grad{"||grad b|| <= lip_grad", 0.0, {}};
    AssumptionRatio lap{"|lap b| <= 2*lap_growth*(1+|x-x0|)", 0.0, {}};
    AssumptionRatio hess{"||d(grad b)/dx_j|| <= hess_bound", 0.0, {}};
    AssumptionRatio glap{"||grad lap b|| <= 2*grad_lap_growth*(1+|x-x0|)", 0.0, {}};
    AssumptionRatio fd{"finite-difference consistency of grad b (tol 1e-6)", 0.0, {}};

    RngStream rng(seed, rng_domain::kAssumptionScan, 0);
    Vec x(d), e(d);
    const double fd_step = 1e-5;
    for (std::int64_t s = 0; s < n_samples; ++s) {
        // uniform in the ball: gaussian direction, radius ~ U^{1/d}
        double nr = 0.0;
        for (int i = 0; i < d; ++i) {
            e[i] = rng.next_normal();
            nr += e[i] * e[i];
        }
        nr = std::sqrt(nr);
        const double rr = radius * std::pow(rng.next_double(), 1.0 / d);
        for (int i = 0; i < d; ++i) x[i] = problem.x0[i] + (nr > 0.0 ? rr * e[i] / nr : 0.0);
        const double dist = norm2(x - problem.x0);

        const Mat J = b.jacobian(x);
        const double jn = operator_norm(J) / b.lip_grad();
        if (jn > grad.max_ratio) {
            grad.max_ratio = jn;
            grad.worst_point = x;
        }

        if (b.has_laplacian()) {
            const double allowed = 2.0 * b.lap_growth() * (1.0 + dist);
            const double got = norm2(b.laplacian(x));
            const double ratio = (got == 0.0) ? 0.0 : got / allowed;
            if (ratio > lap.max_ratio) {
                lap.max_ratio = ratio;
                lap.worst_point = x;
            }
        }
        if (b.has_laplacian_jacobian()) {
            const double allowed = 2.0 * b.grad_lap_growth() * (1.0 + dist);
            const double got = operator_norm(b.laplacian_jacobian(x));
            const double ratio = (got == 0.0) ? 0.0 : got / allowed;
            if (ratio > glap.max_ratio) {
                glap.max_ratio = ratio;
                glap.worst_point = x;
            }
        }

        // hessian column blocks via finite differences of grad b
        {
            double worst = 0.0;
            for (int j = 0; j < d; ++j) {
                Vec xp = x, xm = x;
                xp[j] += fd_step;
                xm[j] -= fd_step;
                const Mat Jp = b.jacobian(xp);
                const Mat Jm = b.jacobian(xm);
                Mat H(d, d);
                for (size_t t = 0; t < H.a.size(); ++t) H.a[t] = (Jp.a[t] - Jm.a[t]) / (2.0 * fd_step);
                worst = std::max(worst, operator_norm(H));
            }
            const double hratio = worst / b.hess_bound();
            if (hratio > hess.max_ratio) {
                hess.max_ratio = hratio;
                hess.worst_point = x;
            }
        }

        // gradient vs central differences of b (relative to lip_grad scale)
        double fd_err = 0.0;
        for (int j = 0; j < d; ++j) {
            Vec xp = x, xm = x;
            xp[j] += fd_step;
            xm[j] -= fd_step;
            const Vec bp = b.value(xp);
            const Vec bm = b.value(xm);
            for (int i = 0; i < d; ++i)
                fd_err = std::max(fd_err, std::fabs((bp[i] - bm[i]) / (2.0 * fd_step) - J(i, j)));
        }
        const double fd_ratio = fd_err / (1e-6 * std::max(1.0, b.lip_grad()));
        if (fd_ratio > fd.max_ratio) {
            fd.max_ratio = fd_ratio;
            fd.worst_point = x;
        }
    }

    rep.ratios = {grad, lap, hess, glap, fd};
    for (const auto& r : rep.ratios) {
        if (r.max_ratio > 1.0) rep.violations.push_back(r.inequality);
    }
    return rep;
}

}  // namespace mlmc
