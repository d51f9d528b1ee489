#include "storder/distortions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

namespace storder {

struct Distortion::Impl {
    std::string label;
    Fn fn;
    Fn deriv;
    Fn inv;
    // Inverse and derivative of the dual h*(u) = 1 - h(1-u), kept separately
    // so that small u keep full relative precision.
    Fn dual_inv;
    Fn dual_deriv;
    Provenance provenance = Provenance::builtin;
    bool strict = false;
    std::optional<Expr> expr;
};

namespace {

constexpr double kEndpointTol = 1e-12;
constexpr double kDualSeriesCutoff = 1e-6;
constexpr Tolerance kMonotoneTol{1e-12, 1e-12};

std::string number_label(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<double> closed_points(const Grid& grid) {
    std::vector<double> pts;
    pts.reserve(grid.size() + 2);
    pts.push_back(0.0);
    pts.insert(pts.end(), grid.points().begin(), grid.points().end());
    pts.push_back(1.0);
    return pts;
}

}  // namespace

std::string to_string(Provenance p) {
    switch (p) {
        case Provenance::expression: return "expression";
        case Provenance::system_derived: return "system-derived";
        case Provenance::builtin: return "built-in";
    }
    return "?";
}

Distortion Distortion::make_validated(std::shared_ptr<Impl> impl, const Grid& grid) {
    const auto& fn = impl->fn;
    const double h0 = fn(0.0);
    const double h1 = fn(1.0);
    if (std::abs(h0) > kEndpointTol)
        throw ValidationError("distortion " + impl->label + ": h(0) = " + number_label(h0) +
                                  " != 0",
                              0.0);
    if (std::abs(h1 - 1.0) > kEndpointTol)
        throw ValidationError("distortion " + impl->label + ": h(1) = " + number_label(h1) +
                                  " != 1",
                              1.0);

    const auto pts = closed_points(grid);
    std::vector<double> values(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) values[i] = fn(pts[i]);
    if (auto bad = first_reversal(values, true, kMonotoneTol))
        throw ValidationError("distortion " + impl->label + " is not increasing", pts[*bad + 1]);
    if (values.front() < -kEndpointTol || values.back() > 1.0 + kEndpointTol)
        throw ValidationError("distortion " + impl->label + " leaves [0,1]", 0.0);

    bool strict = true;
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        if (!(values[i + 1] > values[i])) {
            strict = false;
            break;
        }
    }
    impl->strict = strict;

    if (!impl->deriv) {
        impl->deriv = [f = impl->fn](double p) { return storder::derivative(f, p, 1e-6, 0.0, 1.0); };
    }
    if (!impl->inv) {
        impl->inv = [f = impl->fn, df = impl->deriv](double y) {
            return monotone_inverse(f, df, std::clamp(y, 0.0, 1.0), 0.0, 1.0);
        };
    }
    return Distortion(std::move(impl));
}

Distortion Distortion::identity() {
    auto impl = std::make_shared<Impl>();
    impl->label = "identity";
    impl->fn = [](double p) { return p; };
    impl->deriv = [](double) { return 1.0; };
    impl->inv = [](double y) { return std::clamp(y, 0.0, 1.0); };
    return make_validated(std::move(impl), Grid::uniform());
}

Distortion Distortion::power(double k) {
    if (!(k > 0.0) || !std::isfinite(k))
        throw std::invalid_argument("power distortion needs k > 0");
    auto impl = std::make_shared<Impl>();
    impl->label = "power:" + number_label(k);
    impl->fn = [k](double p) { return std::pow(p, k); };
    impl->deriv = [k](double p) { return k * std::pow(p, k - 1.0); };
    impl->inv = [k](double y) { return std::pow(std::clamp(y, 0.0, 1.0), 1.0 / k); };
    impl->dual_inv = [k](double p) { return -std::expm1(std::log1p(-std::clamp(p, 0.0, 1.0)) / k); };
    impl->dual_deriv = [k](double u) { return k * std::pow(1.0 - u, k - 1.0); };
    return make_validated(std::move(impl), Grid::uniform());
}

Distortion Distortion::dual_power(double k) {
    if (!(k > 0.0) || !std::isfinite(k))
        throw std::invalid_argument("dualpower distortion needs k > 0");
    auto impl = std::make_shared<Impl>();
    impl->label = "dualpower:" + number_label(k);
    impl->fn = [k](double p) { return 1.0 - std::pow(1.0 - p, k); };
    impl->deriv = [k](double p) { return k * std::pow(1.0 - p, k - 1.0); };
    impl->inv = [k](double y) {
        return 1.0 - std::pow(1.0 - std::clamp(y, 0.0, 1.0), 1.0 / k);
    };
    impl->dual_inv = [k](double p) { return std::pow(std::clamp(p, 0.0, 1.0), 1.0 / k); };
    impl->dual_deriv = [k](double u) { return k * std::pow(u, k - 1.0); };
    return make_validated(std::move(impl), Grid::uniform());
}

Distortion Distortion::from_expr(const Expr& expr, const Grid& grid) {
    auto impl = std::make_shared<Impl>();
    impl->label = expr.render();
    impl->fn = [expr](double p) { return expr.eval(p); };
    impl->deriv = [expr](double p) { return expr.derivative(p); };
    impl->provenance = Provenance::expression;
    impl->expr = expr;
    return make_validated(std::move(impl), grid);
}

Distortion Distortion::from_function(std::string label, Fn fn, Fn derivative, Fn inverse,
                                     Provenance provenance, const Grid& grid) {
    auto impl = std::make_shared<Impl>();
    impl->label = std::move(label);
    impl->fn = std::move(fn);
    impl->deriv = std::move(derivative);
    impl->inv = std::move(inverse);
    impl->provenance = provenance;
    return make_validated(std::move(impl), grid);
}

double Distortion::operator()(double p) const { return impl_->fn(p); }
double Distortion::derivative(double p) const { return impl_->deriv(p); }
double Distortion::inverse(double y) const { return impl_->inv(y); }

double Distortion::dual_inverse(double p) const {
    if (impl_->dual_inv) return impl_->dual_inv(p);
    p = std::clamp(p, 0.0, 1.0);
    if (p > 0.0 && p < kDualSeriesCutoff) {
        // 1 - p keeps only a few digits of p here. Invert the expansion
        // h*(u) = h'(1) u - h''(1) u^2 / 2 + O(u^3) instead.
        const double slope = impl_->deriv(1.0);
        if (slope > 0.0 && std::isfinite(slope)) {
            constexpr double step = 1e-4;
            const double curv = (slope - impl_->deriv(1.0 - step)) / step;
            const double u0 = p / slope;
            const double u = std::isfinite(curv) ? u0 + curv * u0 * u0 / (2.0 * slope) : u0;
            if (u > 0.0) return u;
        }
    }
    return 1.0 - impl_->inv(1.0 - p);
}

double Distortion::dual_derivative(double u) const {
    if (impl_->dual_deriv) return impl_->dual_deriv(u);
    return impl_->deriv(1.0 - u);
}
bool Distortion::strictly_increasing() const noexcept { return impl_->strict; }
Provenance Distortion::provenance() const noexcept { return impl_->provenance; }
const std::string& Distortion::label() const noexcept { return impl_->label; }
const std::optional<Expr>& Distortion::expr() const noexcept { return impl_->expr; }

Distortion validate_distortion(const Expr& fn, const Grid& grid) {
    return Distortion::from_expr(fn, grid);
}

Distortion dual(const Distortion& h) {
    auto impl = std::make_shared<Distortion::Impl>();
    impl->label = "dual(" + h.label() + ")";
    impl->fn = [h](double p) { return 1.0 - h(1.0 - p); };
    impl->deriv = [h](double p) { return h.derivative(1.0 - p); };
    if (h.strictly_increasing())
        impl->inv = [h](double y) { return h.dual_inverse(y); };
    impl->dual_inv = [h](double p) { return h.inverse(p); };
    impl->dual_deriv = [h](double u) { return h.derivative(u); };
    impl->provenance = h.provenance();
    return Distortion::make_validated(std::move(impl), Grid::uniform());
}

Distortion compose_on_survival(const Distortion& h1, const Distortion& h2) {
    auto impl = std::make_shared<Distortion::Impl>();
    impl->label = "compose(" + h1.label() + ", " + h2.label() + ")";
    impl->fn = [h1, h2](double p) { return h2(h1(p)); };
    impl->deriv = [h1, h2](double p) { return h2.derivative(h1(p)) * h1.derivative(p); };
    if (h1.strictly_increasing() && h2.strictly_increasing())
        impl->inv = [h1, h2](double y) { return h1.inverse(h2.inverse(y)); };
    impl->provenance = h1.provenance() == h2.provenance() ? h1.provenance()
                                                           : Provenance::system_derived;
    return Distortion::make_validated(std::move(impl), Grid::uniform());
}

ShapeReport classify(const Distortion& h, const Grid& grid, const Tolerance& tol) {
    ShapeReport r;
    r.strictly_increasing = h.strictly_increasing();

    std::vector<double> ratio(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) ratio[i] = h(grid[i]) / grid[i];
    const auto star_bad = first_reversal(ratio, true, tol);
    const auto anti_bad = first_reversal(ratio, false, tol);
    r.starshaped = !star_bad;
    r.antistarshaped = !anti_bad;
    if (star_bad) r.witnesses["starshaped"] = grid[*star_bad + 1];
    if (anti_bad) r.witnesses["antistarshaped"] = grid[*anti_bad + 1];

    const auto pts = closed_points(grid);
    std::vector<double> slopes(pts.size() - 1);
    double prev = h(pts[0]);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double next = h(pts[i + 1]);
        slopes[i] = (next - prev) / (pts[i + 1] - pts[i]);
        prev = next;
    }
    const auto convex_bad = first_reversal(slopes, true, tol);
    const auto concave_bad = first_reversal(slopes, false, tol);
    r.convex = !convex_bad;
    r.concave = !concave_bad;
    if (convex_bad) r.witnesses["convex"] = pts[*convex_bad + 1];
    if (concave_bad) r.witnesses["concave"] = pts[*concave_bad + 1];
    return r;
}

}  // namespace storder
