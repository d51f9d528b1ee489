#include "storder/distributions.hpp"

#include <cmath>
#include <cstdio>
#include <mutex>
#include <stdexcept>

namespace storder {

namespace {

constexpr double kSupportEps = 1e-6;
constexpr QuadratureOptions kMeanQuadrature{{1e-12, 1e-12}, 48, 20000};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

struct Distribution::Model {
    std::string label;
    double low = 0.0;

    virtual ~Model() = default;
    virtual double q(double p) const = 0;
    virtual double dq(double p) const = 0;
    // q(1 - s) and q'(1 - s), for models that can keep precision as s -> 0.
    virtual double q_upper(double s) const { return q(1.0 - s); }
    virtual double dq_upper(double s) const { return dq(1.0 - s); }
    virtual std::optional<double> closed_mean() const { return std::nullopt; }
    virtual const Distribution* base() const { return nullptr; }
    virtual const Distortion* distortion() const { return nullptr; }

    // Generic cdf: sup{p : q(p) <= x}, by bisection in p.
    virtual double cdf(double x) const {
        if (x <= low) return 0.0;
        double a = 0.0, b = 1.0;
        for (int it = 0; it < kMaxBisectionIterations; ++it) {
            const double mid = a + 0.5 * (b - a);
            if (mid <= a || mid >= b) break;
            if (q(mid) > x)
                b = mid;
            else
                a = mid;
        }
        return a;
    }

    virtual double density(double x) const {
        const double p = cdf(x);
        if (p <= 0.0 || p >= 1.0) return 0.0;
        return 1.0 / dq(p);
    }

    double mean() const {
        std::call_once(mean_once_, [this] { compute_mean(); });
        if (!mean_error_.empty()) throw InfiniteMeanError(mean_error_);
        return mean_value_;
    }

    bool finite_mean() const {
        std::call_once(mean_once_, [this] { compute_mean(); });
        return mean_error_.empty();
    }

private:
    void compute_mean() const {
        if (auto m = closed_mean()) {
            mean_value_ = *m;
            return;
        }
        auto fn = [this](double p) { return q(p); };
        try {
            // Contributions of successive decades of the upper tail. For a
            // finite mean they shrink geometrically.
            double prev = -1.0, prev_ratio = 0.0;
            int heavy = 0;
            for (int k = 2; k <= 8; ++k) {
                const double a = 1.0 - std::pow(10.0, -k);
                const double b = 1.0 - std::pow(10.0, -(k + 1));
                const double part = integrate(fn, a, b, kMeanQuadrature);
                if (prev > 0.0) {
                    const double ratio = part / prev;
                    if (ratio >= 0.9 && prev_ratio >= 0.9) ++heavy;
                    prev_ratio = ratio;
                }
                prev = part;
            }
            if (heavy > 0) {
                mean_error_ = label + ": upper-tail contributions do not shrink";
                return;
            }
            mean_value_ = integrate(fn, 0.0, 1.0, kMeanQuadrature);
        } catch (const QuadratureError& e) {
            mean_error_ = label + ": mean integral failed (" + e.what() + ")";
        }
    }

    mutable std::once_flag mean_once_;
    mutable double mean_value_ = 0.0;
    mutable std::string mean_error_;
};

namespace {

struct ExponentialModel final : Distribution::Model {
    double rate;
    explicit ExponentialModel(double r) : rate(r) { label = "exp:" + fmt(r); }
    double q(double p) const override { return -std::log1p(-p) / rate; }
    double dq(double p) const override { return 1.0 / (rate * (1.0 - p)); }
    double q_upper(double s) const override { return -std::log(s) / rate; }
    double dq_upper(double s) const override { return 1.0 / (rate * s); }
    double cdf(double x) const override { return x <= 0.0 ? 0.0 : -std::expm1(-rate * x); }
    double density(double x) const override { return x < 0.0 ? 0.0 : rate * std::exp(-rate * x); }
    std::optional<double> closed_mean() const override { return 1.0 / rate; }
};

struct QuantileModel final : Distribution::Model {
    Expr expr;
    std::optional<Expr> upper;
    explicit QuantileModel(Expr e) : expr(std::move(e)), upper(expr.reflected()) {
        label = "q:" + expr.render();
    }
    double q(double p) const override { return expr.eval(p); }
    double dq(double p) const override { return expr.derivative(p); }
    double q_upper(double s) const override { return upper ? upper->eval(s) : q(1.0 - s); }
    double dq_upper(double s) const override {
        return upper ? -upper->derivative(s) : dq(1.0 - s);
    }
};

struct HazardModel final : Distribution::Model {
    Expr psi;
    double psi0;
    explicit HazardModel(Expr e) : psi(std::move(e)), psi0(psi.eval(0.0)) {
        label = "hazard:" + psi.render();
    }
    double q(double p) const override { return at_hazard(-std::log1p(-p)); }
    double dq(double p) const override {
        return 1.0 / (psi.derivative(q(p)) * (1.0 - p));
    }
    double q_upper(double s) const override { return at_hazard(-std::log(s)); }
    double dq_upper(double s) const override {
        return 1.0 / (psi.derivative(q_upper(s)) * s);
    }
    double at_hazard(double y) const {
        if (y <= psi0) return 0.0;
        auto fn = [this](double x) { return psi.eval(x); };
        double lo = 0.0, hi = 1.0;
        for (int grow = 0; fn(hi) < y; ++grow) {
            if (grow > 1000) throw RangeError(label + ": hazard appears bounded");
            lo = hi;
            hi *= 2.0;
        }
        return monotone_inverse(fn, y, lo, hi);
    }
    double cdf(double x) const override { return x < 0.0 ? 0.0 : -std::expm1(-psi.eval(x)); }
    double density(double x) const override {
        if (x < 0.0) return 0.0;
        auto [v, d] = psi.eval_with_derivative(x);
        return d * std::exp(-v);
    }
};

struct DistortedModel final : Distribution::Model {
    Distribution x;
    Distortion h;
    DistortedModel(Distribution base, Distortion dist) : x(std::move(base)), h(std::move(dist)) {
        label = "distort(" + x.label() + ", h=" + h.label() + ")";
    }
    // Above the median the base is evaluated through its upper tail, so
    // that 1 - u is not recovered from u.
    double q(double p) const override {
        if (p >= 0.5) return q_upper(1.0 - p);
        return x.quantile(h.dual_inverse(p));
    }
    double dq(double p) const override {
        if (p >= 0.5) return dq_upper(1.0 - p);
        const double u = h.dual_inverse(p);
        return x.quantile_derivative(u) / h.dual_derivative(u);
    }
    double q_upper(double s) const override { return x.upper_quantile(h.inverse(s)); }
    double dq_upper(double s) const override {
        const double v = h.inverse(s);
        return x.upper_quantile_derivative(v) / h.derivative(v);
    }
    double cdf(double v) const override { return 1.0 - h(x.survival(v)); }
    double density(double v) const override {
        return h.derivative(x.survival(v)) * x.density(v);
    }
    const Distribution* base() const override { return &x; }
    const Distortion* distortion() const override { return &h; }
};

double find_support_low(const Distribution::Model& m) {
    try {
        const double v = m.q(0.0);
        if (std::isfinite(v)) return v;
    } catch (const DomainError&) {
    }
    return m.q(kSupportEps);
}

Distribution finish(std::shared_ptr<Distribution::Model> model, const Grid* grid) {
    model->low = find_support_low(*model);
    if (grid) {
        double prev = model->low;
        if (prev < -1e-12) throw ValidationError(model->label + ": negative support", 0.0);
        for (double p : grid->points()) {
            const double v = model->q(p);
            if (!std::isfinite(v))
                throw ValidationError(model->label + ": quantile not finite", p);
            if (v < -1e-12) throw ValidationError(model->label + ": negative quantile", p);
            if (v < prev - scan_slack(v, prev, {1e-12, 1e-12}))
                throw ValidationError(model->label + ": quantile not increasing", p);
            prev = v;
        }
    }
    return Distribution(std::move(model));
}

}  // namespace

Distribution::Distribution(std::shared_ptr<const Model> model) : model_(std::move(model)) {}

double Distribution::quantile(double p) const { return model_->q(p); }
double Distribution::quantile_derivative(double p) const { return model_->dq(p); }
double Distribution::upper_quantile(double s) const { return model_->q_upper(s); }
double Distribution::upper_quantile_derivative(double s) const { return model_->dq_upper(s); }
double Distribution::cdf(double x) const { return std::clamp(model_->cdf(x), 0.0, 1.0); }
double Distribution::density(double x) const { return model_->density(x); }

double Distribution::density_at_quantile(double p) const {
    const double d = model_->dq(p);
    if (!(d != 0.0) || !std::isfinite(d))
        throw DegenerateDensityError(model_->label + ": q'(" + fmt(p) + ") = " + fmt(d));
    return 1.0 / d;
}

double Distribution::support_low() const noexcept { return model_->low; }
double Distribution::mean() const { return model_->mean(); }
bool Distribution::finite_mean() const { return model_->finite_mean(); }
const std::string& Distribution::label() const noexcept { return model_->label; }
const Distribution* Distribution::base() const noexcept { return model_->base(); }
const Distortion* Distribution::distortion() const noexcept { return model_->distortion(); }

Distribution exponential(double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate))
        throw std::invalid_argument("exponential rate must be positive");
    return finish(std::make_shared<ExponentialModel>(rate), nullptr);
}

Distribution from_quantile(const Expr& q, const Grid& grid) {
    return finish(std::make_shared<QuantileModel>(q), &grid);
}

Distribution from_hazard(const Expr& psi, const Grid& grid) {
    auto model = std::make_shared<HazardModel>(psi);
    if (model->psi0 < 0.0) throw ValidationError(model->label + ": psi(0) < 0", 0.0);
    return finish(std::move(model), &grid);
}

Distribution distort(const Distribution& x, const Distortion& h) {
    return finish(std::make_shared<DistortedModel>(x, h), nullptr);
}

Distribution build(const DistributionSpec& spec, const Grid& grid) {
    return std::visit(
        [&](const auto& form) -> Distribution {
            using T = std::decay_t<decltype(form)>;
            if constexpr (std::is_same_v<T, spec::Exponential>)
                return exponential(form.rate);
            else if constexpr (std::is_same_v<T, spec::QuantileExpr>)
                return from_quantile(form.q, grid);
            else if constexpr (std::is_same_v<T, spec::HazardExpr>)
                return from_hazard(form.psi, grid);
            else
                return distort(build(*form.base, grid), form.h);
        },
        spec.form);
}

}  // namespace storder
