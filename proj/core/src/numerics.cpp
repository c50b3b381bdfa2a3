#include "mlmc/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace mlmc {

namespace {

// Gauss-Legendre nodes/weights on [-1, 1], computed once by Newton iteration
// on P_n. Accurate to ~1e-15 for the small n used here.
struct GaussRule {
    std::vector<double> x;
    std::vector<double> w;

    explicit GaussRule(int n) : x(n), w(n) {
        for (int i = 0; i < n; ++i) {
            double xi = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
            double pp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = 0.0;
                for (int j = 0; j < n; ++j) {
                    double p2 = p1;
                    p1 = p0;
                    p0 = ((2.0 * j + 1.0) * xi * p1 - j * p2) / (j + 1.0);
                }
                pp = n * (xi * p0 - p1) / (xi * xi - 1.0);
                double dx = p0 / pp;
                xi -= dx;
                if (std::fabs(dx) < 1e-15) break;
            }
            x[i] = xi;
            w[i] = 2.0 / ((1.0 - xi * xi) * pp * pp);
        }
    }
};

const GaussRule& g7() {
    static const GaussRule r(7);
    return r;
}
const GaussRule& g15() {
    static const GaussRule r(15);
    return r;
}

struct Panel {
    double a, b, value, err;
};

void eval_panel(const std::function<double(double)>& f, double a, double b, Panel& p) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double i7 = 0.0, i15 = 0.0;
    for (int i = 0; i < 7; ++i) i7 += g7().w[i] * f(c + h * g7().x[i]);
    for (int i = 0; i < 15; ++i) i15 += g15().w[i] * f(c + h * g15().x[i]);
    p.a = a;
    p.b = b;
    p.value = h * i15;
    p.err = std::fabs(h * (i15 - i7));
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol, double abs_tol) {
    if (a == b) return 0.0;
    auto cmp = [](const Panel& l, const Panel& r) { return l.err < r.err; };
    std::priority_queue<Panel, std::vector<Panel>, decltype(cmp)> heap(cmp);

    // seed with a few panels so sharp features near an endpoint are seen early
    const int n0 = 8;
    double total = 0.0, err = 0.0;
    for (int i = 0; i < n0; ++i) {
        Panel p;
        eval_panel(f, a + (b - a) * i / n0, a + (b - a) * (i + 1) / n0, p);
        total += p.value;
        err += p.err;
        heap.push(p);
    }
    const int max_panels = 20000;
    int panels = n0;
    while (err > std::max(abs_tol, rel_tol * std::fabs(total)) && panels < max_panels) {
        Panel worst = heap.top();
        heap.pop();
        total -= worst.value;
        err -= worst.err;
        Panel left, right;
        const double mid = 0.5 * (worst.a + worst.b);
        eval_panel(f, worst.a, mid, left);
        eval_panel(f, mid, worst.b, right);
        total += left.value + right.value;
        err += left.err + right.err;
        heap.push(left);
        heap.push(right);
        ++panels;
    }
    if (err > std::max(abs_tol, rel_tol * std::fabs(total))) {
        std::ostringstream os;
        os << "integrate: failed to converge, achieved abs error ~" << err << " (value " << total
           << ") after " << panels << " panels";
        throw std::runtime_error(os.str());
    }
    return total;
}

double bisect_root(const std::function<double(double)>& f, double lo, double hi, double rel_tol) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0)) throw std::domain_error("bisect_root: endpoints do not bracket a root");
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if (hi - lo <= rel_tol * std::max(std::fabs(lo), std::fabs(hi))) break;
    }
    return 0.5 * (lo + hi);
}

double golden_section_max(const std::function<double(double)>& f, double lo, double hi, double tol) {
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - invphi * (hi - lo);
    double x2 = lo + invphi * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    while (hi - lo > tol * std::max(1.0, std::fabs(lo) + std::fabs(hi))) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + invphi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - invphi * (hi - lo);
            f1 = f(x1);
        }
    }
    return 0.5 * (lo + hi);
}

namespace {

double betacf(double a, double b, double x) {
    // Lentz continued fraction for the incomplete beta (Numerical Recipes form)
    const double tiny = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 300; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 3e-16) break;
    }
    return h;
}

}  // namespace

double reg_incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double clopper_pearson_upper(std::int64_t successes, std::int64_t trials, double confidence) {
    if (trials <= 0) throw std::invalid_argument("clopper_pearson_upper: trials must be positive");
    if (successes < 0 || successes > trials)
        throw std::invalid_argument("clopper_pearson_upper: successes out of range");
    if (successes == trials) return 1.0;
    const double delta = 1.0 - confidence;
    if (successes == 0) return 1.0 - std::pow(delta, 1.0 / static_cast<double>(trials));
    // upper bound solves I_u(x+1, n-x) = confidence
    const double aa = static_cast<double>(successes) + 1.0;
    const double bb = static_cast<double>(trials - successes);
    auto g = [&](double u) { return reg_incomplete_beta(aa, bb, u) - confidence; };
    return bisect_root(g, 0.0, 1.0, 1e-12);
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line: need >= 2 points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    return f;
}

double guarded_exp(double arg, const char* label) {
    if (arg > 690.0) {
        std::ostringstream os;
        os << label << ": exponent " << arg << " overflows the 1e300 guard";
        throw std::range_error(os.str());
    }
    return std::exp(arg);
}

double guard_finite(double v, const char* label) {
    if (!std::isfinite(v) || std::fabs(v) > 1e300) {
        std::ostringstream os;
        os << label << ": value " << v << " out of range (1e300 guard)";
        throw std::range_error(os.str());
    }
    return v;
}

}  // namespace mlmc
