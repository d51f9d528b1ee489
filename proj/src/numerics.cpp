#include "storder/numerics.hpp"

#include <cstdio>
#include <stdexcept>

namespace storder {

void Tolerance::validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || !std::isfinite(abs_tol) ||
        !std::isfinite(rel_tol))
        throw std::invalid_argument("tolerance fields must be positive and finite");
}

Grid Grid::uniform(std::size_t count, double margin, double lo, double hi) {
    if (count < kMinCount)
        throw std::invalid_argument("grid needs at least " + std::to_string(kMinCount) +
                                    " points");
    if (!(margin > 0.0) || !(lo + margin < hi - margin))
        throw std::invalid_argument("grid margin leaves an empty interval");
    Grid g;
    g.lo_ = lo;
    g.hi_ = hi;
    g.margin_ = margin;
    g.uniform_ = true;
    const double a = lo + margin;
    const double b = hi - margin;
    g.points_.resize(count);
    for (std::size_t i = 0; i < count; ++i)
        g.points_[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1);
    g.points_.back() = b;
    return g;
}

Grid Grid::from_points(std::vector<double> points, double lo, double hi, double margin) {
    if (points.size() < kMinCount)
        throw std::invalid_argument("grid needs at least " + std::to_string(kMinCount) +
                                    " points");
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!(points[i] > lo && points[i] < hi))
            throw std::invalid_argument("grid point outside the open interval");
        if (i > 0 && !(points[i] > points[i - 1]))
            throw std::invalid_argument("grid points must be strictly increasing");
    }
    Grid g;
    g.points_ = std::move(points);
    g.lo_ = lo;
    g.hi_ = hi;
    g.margin_ = margin;
    return g;
}

std::string Grid::describe() const {
    char buf[128];
    if (uniform_)
        std::snprintf(buf, sizeof buf, "uniform(%zu,[%.17g,%.17g])", points_.size(),
                      points_.front(), points_.back());
    else
        std::snprintf(buf, sizeof buf, "points(%zu,[%.17g,%.17g])", points_.size(),
                      points_.front(), points_.back());
    return buf;
}

std::string to_string(Monotonicity m) {
    switch (m) {
        case Monotonicity::increasing: return "increasing";
        case Monotonicity::decreasing: return "decreasing";
        case Monotonicity::constant: return "constant";
        case Monotonicity::neither: return "neither";
    }
    return "?";
}

std::string to_string(SignClass s) {
    switch (s) {
        case SignClass::nonnegative: return "nonnegative";
        case SignClass::nonpositive: return "nonpositive";
        case SignClass::mixed: return "mixed";
    }
    return "?";
}

MonotoneScan monotone_scan(std::span<const double> values, const Tolerance& tol) {
    if (values.empty()) throw std::invalid_argument("monotone_scan: empty sequence");
    bool seen_up = false;
    bool seen_down = false;
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        const double a = values[i];
        const double b = values[i + 1];
        const double slack = scan_slack(a, b, tol);
        if (b - a > slack) {
            if (seen_down) return {Monotonicity::neither, i};
            seen_up = true;
        } else if (a - b > slack) {
            if (seen_up) return {Monotonicity::neither, i};
            seen_down = true;
        }
    }
    if (seen_up) return {Monotonicity::increasing, std::nullopt};
    if (seen_down) return {Monotonicity::decreasing, std::nullopt};
    return {Monotonicity::constant, std::nullopt};
}

SignScan sign_scan(std::span<const double> values, const Tolerance& tol) {
    if (values.empty()) throw std::invalid_argument("sign_scan: empty sequence");
    bool any_neg = false;
    bool any_pos = false;
    for (double v : values) {
        any_neg = any_neg || v < -tol.abs_tol;
        any_pos = any_pos || v > tol.abs_tol;
    }
    if (!any_neg) return {SignClass::nonnegative, std::nullopt};
    if (!any_pos) return {SignClass::nonpositive, std::nullopt};

    // Sign of the first decisive value, then the first value contradicting it.
    int prefix = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const int s = values[i] > tol.abs_tol ? 1 : (values[i] < -tol.abs_tol ? -1 : 0);
        if (s == 0) continue;
        if (prefix == 0)
            prefix = s;
        else if (s != prefix)
            return {SignClass::mixed, i};
    }
    return {SignClass::mixed, std::nullopt};
}

}  // namespace storder
