#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <optional>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "storder/error.hpp"

namespace storder {

struct Tolerance {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;

    /// Throws std::invalid_argument unless both fields are positive and finite.
    void validate() const;
};

/// Strictly increasing sample points inside the open interval (lo, hi).
class Grid {
public:
    static constexpr std::size_t kMinCount = 16;

    /// `count` equally spaced points on [lo + margin, hi - margin].
    static Grid uniform(std::size_t count = 512, double margin = 1e-3, double lo = 0.0,
                        double hi = 1.0);

    /// Arbitrary points; validated against the invariants.
    static Grid from_points(std::vector<double> points, double lo = 0.0, double hi = 1.0,
                            double margin = 1e-3);

    std::span<const double> points() const noexcept { return points_; }
    std::size_t size() const noexcept { return points_.size(); }
    double operator[](std::size_t i) const { return points_[i]; }
    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }
    double edge_margin() const noexcept { return margin_; }
    bool is_uniform() const noexcept { return uniform_; }

    /// Short human-readable description, e.g. "uniform(512,[0.001,0.999])".
    std::string describe() const;

private:
    Grid() = default;
    std::vector<double> points_;
    double lo_ = 0.0;
    double hi_ = 1.0;
    double margin_ = 1e-3;
    bool uniform_ = false;
};

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

namespace detail {

struct KronrodSegment {
    double a, b, value, error;
    int depth;
    bool operator<(const KronrodSegment& other) const { return error < other.error; }
};

// 7-point Gauss / 15-point Kronrod pair (QUADPACK qk15 constants).
template <class Fn>
KronrodSegment gauss_kronrod15(const Fn& fn, double a, double b, int depth) {
    static constexpr double xgk[8] = {
        0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
        0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
        0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
        0.207784955007898467600689403773245, 0.0};
    static constexpr double wg[4] = {
        0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
        0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
    static constexpr double wgk[8] = {
        0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
        0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
        0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
        0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    auto eval = [&](double x) {
        const double y = static_cast<double>(fn(x));
        if (!std::isfinite(y))
            throw QuadratureError("non-finite integrand at x=" + std::to_string(x), 0.0,
                                  INFINITY);
        return y;
    };

    const double fc = eval(center);
    double kronrod = wgk[7] * fc;
    double gauss = wg[3] * fc;
    for (int j = 0; j < 7; ++j) {
        const double dx = half * xgk[j];
        const double pair = eval(center - dx) + eval(center + dx);
        kronrod += wgk[j] * pair;
        if (j % 2 == 1) gauss += wg[j / 2] * pair;
    }
    kronrod *= half;
    gauss *= half;
    return {a, b, kronrod, std::abs(kronrod - gauss), depth};
}

}  // namespace detail

struct QuadratureOptions {
    Tolerance tol{1e-10, 1e-10};
    int max_depth = 48;               // finest segment is (b-a) / 2^max_depth
    std::size_t max_segments = 4000;
};

/// Globally adaptive Gauss-Kronrod quadrature of fn over [a, b].
///
/// The rule never samples the endpoints, so integrands with integrable
/// singularities at a or b (typical for quantile-space integrals over (0,1))
/// are handled without truncating the interval. Converges when the summed
/// error estimate is below max(abs_tol, rel_tol * |result|); otherwise throws
/// QuadratureError carrying the last estimate.
template <class Fn>
double integrate(const Fn& fn, double a, double b, const QuadratureOptions& opt = {}) {
    if (!(a <= b)) throw std::invalid_argument("integrate: requires a <= b");
    if (a == b) return 0.0;

    std::priority_queue<detail::KronrodSegment> queue;
    auto first = detail::gauss_kronrod15(fn, a, b, 0);
    double total = first.value;
    double total_err = first.error;
    queue.push(first);

    auto converged = [&] {
        return total_err <= std::max(opt.tol.abs_tol, opt.tol.rel_tol * std::abs(total));
    };

    std::vector<detail::KronrodSegment> frozen;
    while (!converged()) {
        if (queue.empty() || queue.size() + frozen.size() >= opt.max_segments)
            throw QuadratureError("quadrature did not converge", total, total_err);
        auto worst = queue.top();
        queue.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (worst.depth >= opt.max_depth || !(worst.a < mid && mid < worst.b)) {
            frozen.push_back(worst);
            continue;
        }
        auto left = detail::gauss_kronrod15(fn, worst.a, mid, worst.depth + 1);
        auto right = detail::gauss_kronrod15(fn, mid, worst.b, worst.depth + 1);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        queue.push(left);
        queue.push(right);
    }
    // Re-sum to shed the drift accumulated by incremental updates.
    double sum = 0.0;
    while (!queue.empty()) {
        sum += queue.top().value;
        queue.pop();
    }
    for (const auto& s : frozen) sum += s.value;
    return sum;
}

/// Error floor, relative to the L1 norm, accepted from the tanh-sinh rule
/// when the integrand loses precision right next to a singular endpoint
/// (e.g. ln(1-p) rounding to 0 for p below machine epsilon).
inline constexpr double kSingularFloor = 1e-7;

inline std::string format_g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

/// Tanh-sinh quadrature for an interval with an integrable singularity at a
/// and/or b, where bisection would need far more than max_depth halvings.
/// Endpoints are never sampled. Targets max(abs_tol, rel_tol * L1) and throws
/// QuadratureError when the error estimate exceeds kSingularFloor * max(1, L1).
template <class Fn>
double integrate_singular(const Fn& fn, double a, double b, const Tolerance& tol) {
    if (!(a <= b)) throw std::invalid_argument("integrate_singular: requires a <= b");
    if (a == b) return 0.0;
    thread_local boost::math::quadrature::tanh_sinh<double> rule(15);
    double error = 0.0, l1 = 0.0;
    std::size_t levels = 0;
    const double value = rule.integrate(
        [&fn](double x) { return static_cast<double>(fn(x)); }, a, b, tol.rel_tol, &error, &l1,
        &levels);
    if (!std::isfinite(value) || error > kSingularFloor * std::max(1.0, l1))
        throw QuadratureError("tanh-sinh quadrature did not converge on [" + std::to_string(a) +
                                  ", " + std::to_string(b) + "] (error " +
                                  format_g(error) + ", L1 " + format_g(l1) + ")",
                              value, error);
    return value;
}

// ---------------------------------------------------------------------------
// Inversion and differentiation
// ---------------------------------------------------------------------------

inline constexpr int kMaxBisectionIterations = 200;

/// Generalized (left-continuous) inverse of an increasing fn on [lo, hi]:
/// returns inf{x in [lo,hi] : fn(x) >= y}, located by bisection to full
/// double precision. Throws RangeError when y lies outside [fn(lo), fn(hi)]
/// by more than tol.abs_tol.
template <class Fn>
double monotone_inverse(const Fn& fn, double y, double lo, double hi,
                        const Tolerance& tol = {1e-12, 1e-12}) {
    if (!(lo <= hi)) throw std::invalid_argument("monotone_inverse: requires lo <= hi");
    const double flo = fn(lo);
    const double fhi = fn(hi);
    if (y < flo - tol.abs_tol || y > fhi + tol.abs_tol)
        throw RangeError("monotone_inverse: target " + std::to_string(y) + " outside [" +
                         std::to_string(flo) + ", " + std::to_string(fhi) + "]");
    if (y <= flo) return lo;
    if (y > fhi) return hi;
    double a = lo, b = hi;
    for (int it = 0; it < kMaxBisectionIterations; ++it) {
        const double mid = a + 0.5 * (b - a);
        if (mid <= a || mid >= b) break;
        if (fn(mid) >= y)
            b = mid;
        else
            a = mid;
    }
    return b;
}

/// Same contract as monotone_inverse, with Newton steps taken inside the
/// bisection bracket whenever dfn gives a usable slope. dfn only steers the
/// search; a wrong slope costs iterations, not correctness.
template <class Fn, class DFn>
double monotone_inverse(const Fn& fn, const DFn& dfn, double y, double lo, double hi,
                        const Tolerance& tol = {1e-12, 1e-12}) {
    if (!(lo <= hi)) throw std::invalid_argument("monotone_inverse: requires lo <= hi");
    const double flo = fn(lo);
    const double fhi = fn(hi);
    if (y < flo - tol.abs_tol || y > fhi + tol.abs_tol)
        throw RangeError("monotone_inverse: target " + std::to_string(y) + " outside [" +
                         std::to_string(flo) + ", " + std::to_string(fhi) + "]");
    if (y <= flo) return lo;
    if (y > fhi) return hi;
    // Invariant: fn(a) < y <= fn(b).
    double a = lo, b = hi;
    double x = fhi > flo ? lo + (y - flo) / (fhi - flo) * (hi - lo) : 0.5 * (lo + hi);
    for (int it = 0; it < kMaxBisectionIterations; ++it) {
        if (!(x > a && x < b)) x = a + 0.5 * (b - a);
        if (x <= a || x >= b) break;
        const double fx = fn(x);
        if (fx >= y)
            b = x;
        else
            a = x;
        if (fx == y) break;
        const double slope = dfn(x);
        const double next = x - (fx - y) / slope;
        if (std::abs(next - x) <= 2.0 * std::numeric_limits<double>::epsilon() * std::abs(x)) {
            return std::clamp(next, a, b);
        }
        x = std::isfinite(next) && slope > 0.0 ? next : a + 0.5 * (b - a);
    }
    return b;
}

/// Central difference (fn(x+step) - fn(x-step)) / (2 step). When the stencil
/// would leave [lo, hi] a second-order one-sided stencil is used instead.
template <class Fn>
double derivative(const Fn& fn, double x, double step = 1e-6, double lo = -INFINITY,
                  double hi = INFINITY) {
    if (x - step >= lo && x + step <= hi)
        return (fn(x + step) - fn(x - step)) / (2.0 * step);
    if (x + 2.0 * step <= hi)
        return (-3.0 * fn(x) + 4.0 * fn(x + step) - fn(x + 2.0 * step)) / (2.0 * step);
    return (3.0 * fn(x) - 4.0 * fn(x - step) + fn(x - 2.0 * step)) / (2.0 * step);
}

// ---------------------------------------------------------------------------
// Tolerance-aware scans
// ---------------------------------------------------------------------------

enum class Monotonicity { increasing, decreasing, constant, neither };
enum class SignClass { nonnegative, nonpositive, mixed };

std::string to_string(Monotonicity m);
std::string to_string(SignClass s);

struct MonotoneScan {
    Monotonicity kind = Monotonicity::constant;
    /// For `neither`: index i of the first pair (i, i+1) whose direction
    /// contradicts the trend established before it (the turning point).
    std::optional<std::size_t> witness_index;
};

struct SignScan {
    SignClass kind = SignClass::nonnegative;
    /// For `mixed`: first index whose value violates the sign of the prefix.
    std::optional<std::size_t> witness_index;
};

/// Default tie tolerance for scans ("increasing" means non-decreasing).
inline constexpr Tolerance kScanTolerance{1e-9, 1e-12};

/// Classifies a sequence as non-decreasing / non-increasing, tolerating
/// adjacent reversals smaller than abs_tol + rel_tol * max(|v_i|, |v_i+1|).
MonotoneScan monotone_scan(std::span<const double> values, const Tolerance& tol = kScanTolerance);

/// "nonnegative" if every value >= -abs_tol, else "nonpositive" if every
/// value <= abs_tol, else "mixed".
SignScan sign_scan(std::span<const double> values, const Tolerance& tol = kScanTolerance);

/// Slack allowed between two adjacent samples before a reversal counts.
inline double scan_slack(double a, double b, const Tolerance& tol) {
    return tol.abs_tol + tol.rel_tol * std::max(std::abs(a), std::abs(b));
}

/// First adjacent pair (i, i+1) that moves against the required direction
/// by more than the scan slack, if any.
inline std::optional<std::size_t> first_reversal(std::span<const double> values, bool increasing,
                                                 const Tolerance& tol = kScanTolerance) {
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        const double step = increasing ? values[i + 1] - values[i] : values[i] - values[i + 1];
        if (step < -scan_slack(values[i], values[i + 1], tol)) return i;
    }
    return std::nullopt;
}

}  // namespace storder
