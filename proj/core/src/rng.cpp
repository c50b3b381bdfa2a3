#include "mlmc/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace mlmc {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void philox_round(std::array<std::uint32_t, 4>& c, const std::array<std::uint32_t, 2>& k) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
    philox_round(ctr, key);
    for (int r = 1; r < 10; ++r) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
        philox_round(ctr, key);
    }
    return ctr;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint32_t domain, std::uint64_t index) {
    const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(master),
                                              static_cast<std::uint32_t>(master >> 32)};
    const std::array<std::uint32_t, 4> ctr = {0xdeadbeefu, static_cast<std::uint32_t>(index),
                                              static_cast<std::uint32_t>(index >> 32), domain};
    const auto out = philox4x32(ctr, key);
    return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

RngStream::RngStream(std::uint64_t seed, std::uint32_t domain, std::uint64_t index)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      ctr_{0u, static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), domain} {}

void RngStream::refill() {
    if (ctr_[0] >= 0xFFFFFFFFu - 4u) throw std::runtime_error("RngStream: counter exhausted");
    std::array<std::uint32_t, 4> c0 = ctr_, c1 = ctr_, c2 = ctr_, c3 = ctr_;
    c1[0] += 1u;
    c2[0] += 2u;
    c3[0] += 3u;
    std::array<std::uint32_t, 2> k = key_;
    for (int r = 0; r < 10; ++r) {
        if (r) {
            k[0] += kWeyl0;
            k[1] += kWeyl1;
        }
        philox_round(c0, k);
        philox_round(c1, k);
        philox_round(c2, k);
        philox_round(c3, k);
    }
    auto pack = [](const std::array<std::uint32_t, 4>& c, std::uint64_t* out) {
        out[0] = (static_cast<std::uint64_t>(c[1]) << 32) | c[0];
        out[1] = (static_cast<std::uint64_t>(c[3]) << 32) | c[2];
    };
    pack(c0, &buf_[0]);
    pack(c1, &buf_[2]);
    pack(c2, &buf_[4]);
    pack(c3, &buf_[6]);
    ctr_[0] += 4u;
    have_ = 8;
}

std::uint64_t RngStream::next_u64() {
    if (have_ == 0) refill();
    return buf_[static_cast<std::size_t>(8 - (have_--))];
}

double RngStream::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

namespace {

// 256-layer ziggurat for the standard normal: base strip + tail, 254
// rectangles, and a top cap whose fast-accept threshold is zero. The right
// edge R is located by bisection so that the top cap has exactly the common
// layer area v; the unit tests re-verify the sampled distribution.
struct ZigguratTables {
    static constexpr int kN = 256;
    double x[kN];          // x[0] = R (widest) down to x[kN-1] = 0 (top cap)
    double fx[kN];         // f(x[i]) with f(u) = exp(-u^2/2)
    double ratio[kN];      // fast-accept thresholds; layer i >= 1 uses x[i]/x[i-1]
    double base_width;     // v / f(R) for the bottom layer
    double r;              // tail start

    ZigguratTables() {
        auto f = [](double u) { return std::exp(-0.5 * u * u); };
        auto tail_area = [](double rr) {
            return std::sqrt(std::numbers::pi / 2.0) * std::erfc(rr / std::numbers::sqrt2);
        };
        // recursion x_{i} = f^{-1}(f(x_{i-1}) + v/x_{i-1}) runs kN-2 steps;
        // closure requires the remaining top cap area x_last (1 - f(x_last))
        // to equal v, i.e. v/x_last + f(x_last) = 1
        auto closure = [&](double rr) {
            const double v = rr * f(rr) + tail_area(rr);
            double xi = rr;
            for (int i = 1; i < kN - 1; ++i) {
                const double arg = v / xi + f(xi);
                if (arg >= 1.0) return 1.0;  // overshoot: r too large
                xi = std::sqrt(-2.0 * std::log(arg));
            }
            return v / xi + f(xi) - 1.0;
        };
        // closure decreases in r: small r overshoots (+1), large r leaves a
        // positive-area gap (negative residual)
        double lo = 3.0, hi = 4.5;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (closure(mid) > 0.0)
                lo = mid;
            else
                hi = mid;
        }
        r = 0.5 * (lo + hi);
        const double v = r * f(r) + tail_area(r);
        x[0] = r;
        for (int i = 1; i < kN - 1; ++i) {
            const double arg = std::min(v / x[i - 1] + f(x[i - 1]), 1.0);
            x[i] = std::sqrt(std::max(-2.0 * std::log(arg), 0.0));
        }
        x[kN - 1] = 0.0;
        for (int i = 0; i < kN; ++i) fx[i] = f(x[i]);
        base_width = v / f(r);
        ratio[0] = r / base_width;  // bottom layer accepts while inside [0, r]
        for (int i = 1; i < kN; ++i) ratio[i] = x[i] / x[i - 1];
    }
};

// namespace-scope constant: no init-guard check on the hot path
const ZigguratTables kZig;

}  // namespace

double RngStream::next_normal() {
    const ZigguratTables& t = kZig;
    for (;;) {
        const std::uint64_t u = next_u64();
        const int iz = static_cast<int>(u & 255u);
        const double sign = (u & 256u) ? -1.0 : 1.0;
        const double s = static_cast<double>(u >> 11) * 0x1.0p-53;
        if (s < t.ratio[iz]) {
            const double width = (iz == 0) ? t.base_width : t.x[iz - 1];
            return sign * s * width;
        }
        if (iz == 0) {
            // tail beyond R (Marsaglia)
            for (;;) {
                const double u1 = next_double();
                const double u2 = next_double();
                const double xt = -std::log(1.0 - u1) / t.r;
                const double yt = -std::log(1.0 - u2);
                if (yt + yt > xt * xt) return sign * (t.r + xt);
            }
        }
        const double xcand = s * t.x[iz - 1];
        const double y = t.fx[iz - 1] + next_double() * (t.fx[iz] - t.fx[iz - 1]);
        if (y < std::exp(-0.5 * xcand * xcand)) return sign * xcand;
    }
}

void RngStream::fill_normals(double* out, std::size_t count) {
    const ZigguratTables& t = kZig;
    for (std::size_t i = 0; i < count; ++i) {
        // common fast path kept branch-light; rare paths defer to next_normal
        const std::uint64_t u = next_u64();
        const int iz = static_cast<int>(u & 255u);
        const double s = static_cast<double>(u >> 11) * 0x1.0p-53;
        if (s < t.ratio[iz]) {
            const double sign = (u & 256u) ? -1.0 : 1.0;
            const double width = (iz == 0) ? t.base_width : t.x[iz - 1];
            out[i] = sign * s * width;
            continue;
        }
        if (iz != 0) {
            const double sign = (u & 256u) ? -1.0 : 1.0;
            const double xcand = s * t.x[iz - 1];
            const double y = t.fx[iz - 1] + next_double() * (t.fx[iz] - t.fx[iz - 1]);
            if (y < std::exp(-0.5 * xcand * xcand)) {
                out[i] = sign * xcand;
                continue;
            }
        } else {
            const double sign = (u & 256u) ? -1.0 : 1.0;
            for (;;) {
                const double u1 = next_double();
                const double u2 = next_double();
                const double xt = -std::log(1.0 - u1) / t.r;
                const double yt = -std::log(1.0 - u2);
                if (yt + yt > xt * xt) {
                    out[i] = sign * (t.r + xt);
                    break;
                }
            }
            continue;
        }
        out[i] = next_normal();  // rejected rectangle sample: retry loop
    }
}

}  // namespace mlmc
