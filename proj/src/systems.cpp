#include "storder/systems.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace storder {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double to_double(const Rational& r) { return boost::rational_cast<double>(r); }

template <class Op, class DOp>
Number combine(const Number& a, const Number& b, Op op, DOp dop) {
    if (a.exact && b.exact) {
        try {
            return Number(op(*a.exact, *b.exact));
        } catch (const boost::bad_rational&) {
            throw std::domain_error("rational arithmetic: division by zero");
        }
    }
    return Number(dop(a.value, b.value));
}

std::optional<long long> exact_isqrt(long long v) {
    if (v < 0) return std::nullopt;
    auto r = static_cast<long long>(std::llround(std::sqrt(static_cast<double>(v))));
    for (long long c = std::max(0LL, r - 1); c <= r + 1; ++c)
        if (c * c == v) return c;
    return std::nullopt;
}

}  // namespace

Number::Number(Rational r) : exact(r), value(to_double(r)) {}

std::string Number::render() const {
    if (!exact) return fmt(value);
    if (exact->denominator() == 1) return std::to_string(exact->numerator());
    return std::to_string(exact->numerator()) + "/" + std::to_string(exact->denominator());
}

Number operator+(const Number& a, const Number& b) {
    return combine(a, b, std::plus<Rational>{}, std::plus<double>{});
}
Number operator-(const Number& a, const Number& b) {
    return combine(a, b, std::minus<Rational>{}, std::minus<double>{});
}
Number operator*(const Number& a, const Number& b) {
    return combine(a, b, std::multiplies<Rational>{}, std::multiplies<double>{});
}
Number operator/(const Number& a, const Number& b) {
    return combine(a, b, std::divides<Rational>{}, std::divides<double>{});
}
Number operator-(const Number& a) { return a.exact ? Number(-*a.exact) : Number(-a.value); }

int sign(const Number& a) {
    if (a.exact) return (*a.exact > Rational(0)) - (*a.exact < Rational(0));
    return (a.value > 0.0) - (a.value < 0.0);
}

int compare(const Number& a, const Number& b) { return sign(a - b); }

Number sqrt(const Number& a) {
    if (sign(a) < 0) throw std::domain_error("square root of a negative number");
    if (a.exact) {
        auto num = exact_isqrt(a.exact->numerator());
        auto den = exact_isqrt(a.exact->denominator());
        if (num && den) return Number(Rational(*num, *den));
    }
    return Number(std::sqrt(a.value));
}

std::optional<Rational> parse_rational(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front())))
        text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())))
        text.remove_suffix(1);
    if (text.empty()) return std::nullopt;

    auto parse_int = [](std::string_view s) -> std::optional<long long> {
        bool neg = false;
        if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
            neg = s[0] == '-';
            s.remove_prefix(1);
        }
        if (s.empty() || s.size() > 17) return std::nullopt;
        long long v = 0;
        for (char c : s) {
            if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
            v = v * 10 + (c - '0');
        }
        return neg ? -v : v;
    };

    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        auto num = parse_int(text.substr(0, slash));
        auto den = parse_int(text.substr(slash + 1));
        if (!num || !den || *den == 0) return std::nullopt;
        return Rational(*num, *den);
    }
    if (auto dot = text.find('.'); dot != std::string_view::npos) {
        std::string digits(text.substr(0, dot));
        std::string_view frac = text.substr(dot + 1);
        if (frac.size() > 15) return std::nullopt;
        long long den = 1;
        for (char c : frac) {
            if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
            digits += c;
            den *= 10;
        }
        if (digits == "-" || digits == "+" || digits.empty()) digits += "0";
        auto num = parse_int(digits);
        if (!num) return std::nullopt;
        return Rational(*num, den);
    }
    auto v = parse_int(text);
    if (!v) return std::nullopt;
    return Rational(*v);
}

// ---------------------------------------------------------------------------
// MinimalSignature

MinimalSignature MinimalSignature::parse(std::string_view text) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto comma = text.find(',', start);
        parts.push_back(text.substr(start, comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    std::vector<Rational> exact;
    std::vector<double> values;
    bool all_exact = true;
    for (auto part : parts) {
        if (auto r = parse_rational(part)) {
            exact.push_back(*r);
            values.push_back(to_double(*r));
            continue;
        }
        all_exact = false;
        try {
            std::size_t used = 0;
            const std::string s(part);
            values.push_back(std::stod(s, &used));
            while (used < s.size() && std::isspace(static_cast<unsigned char>(s[used]))) ++used;
            if (used != s.size()) throw std::invalid_argument("trailing text");
        } catch (const std::exception&) {
            throw std::invalid_argument("signature entry '" + std::string(part) +
                                        "' is not a number");
        }
    }
    return all_exact ? from_rationals(std::move(exact)) : from_values(std::move(values));
}

MinimalSignature MinimalSignature::from_rationals(std::vector<Rational> a) {
    MinimalSignature s;
    for (const auto& r : a) s.values_.push_back(to_double(r));
    s.exact_ = std::move(a);
    s.validate();
    return s;
}

MinimalSignature MinimalSignature::from_values(std::vector<double> a) {
    MinimalSignature s;
    std::vector<Rational> exact;
    bool integral = true;
    for (double v : a) {
        if (!std::isfinite(v)) throw std::invalid_argument("signature entries must be finite");
        if (v != std::floor(v) || std::abs(v) > 9e15)
            integral = false;
        else
            exact.emplace_back(static_cast<long long>(v));
    }
    s.values_ = std::move(a);
    if (integral) s.exact_ = std::move(exact);
    s.validate();
    return s;
}

void MinimalSignature::validate() const {
    if (values_.size() < 2) throw std::invalid_argument("signature needs at least 2 entries");
    if (exact_) {
        Rational sum(0);
        for (const auto& r : *exact_) sum += r;
        if (sum != Rational(1))
            throw std::invalid_argument("signature entries must sum to 1 (sum is " +
                                        Number(sum).render() + ")");
        return;
    }
    double sum = 0.0;
    for (double v : values_) sum += v;
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("signature entries must sum to 1 (sum is " + fmt(sum) + ")");
}

Number MinimalSignature::coefficient(int i) const {
    if (i < 1 || i > n()) throw std::out_of_range("signature index");
    if (exact_) return Number((*exact_)[i - 1]);
    return Number(values_[i - 1]);
}

std::string MinimalSignature::render() const {
    std::string out;
    for (int i = 1; i <= n(); ++i) {
        if (i > 1) out += ",";
        out += coefficient(i).render();
    }
    return out;
}

// ---------------------------------------------------------------------------
// System distortions

namespace {

std::string coef_text(const Number& c) { return "(" + c.render() + ")"; }

std::optional<Expr> expr_in_p(const std::optional<Expr>& e) {
    if (e && e->variable() == "p") return e;
    return std::nullopt;
}

std::string durante_text(const MinimalSignature& sig, const std::string& f) {
    std::string text;
    for (int k = 1; k <= sig.n(); ++k) {
        if (k > 1) text += " + ";
        text += coef_text(sig.coefficient(k)) + "*p";
        if (k > 1) text += "*(" + f + ")^" + std::to_string(k - 1);
    }
    return text;
}

std::optional<Expr> closed_form_for(const MinimalSignature& sig, const CopulaHandle& c) {
    std::optional<std::string> text;
    std::visit(
        [&](const auto& h) {
            using T = std::decay_t<decltype(h)>;
            if constexpr (std::is_same_v<T, copula::Durante>) {
                if (auto f = expr_in_p(h.gen.expr)) text = durante_text(sig, f->render());
            } else if constexpr (std::is_same_v<T, copula::Jaworski>) {
                if (auto d = expr_in_p(h.diag.expr)) {
                    const auto params = diag_system_params(sig);
                    text = coef_text(params.alpha) + "*p + " + coef_text(params.beta) + "*(" +
                           d->render() + ")";
                }
            } else if constexpr (std::is_same_v<T, copula::Product>) {
                std::string s;
                for (int i = 1; i <= sig.n(); ++i) {
                    if (i > 1) s += " + ";
                    s += coef_text(sig.coefficient(i)) + "*p^" + std::to_string(i);
                }
                text = s;
            } else if constexpr (std::is_same_v<T, copula::Comonotone>) {
                text = "p";
            } else if constexpr (std::is_same_v<T, copula::CuadrasAuge>) {
                text = coef_text(sig.coefficient(1)) + "*p + " + coef_text(sig.coefficient(2)) +
                       "*p^(" + fmt(2.0 - h.theta) + ")";
            } else {
                text = durante_text(sig, fmt(h.gamma) + "*p + " + fmt(1.0 - h.gamma));
            }
        },
        c.form);
    if (!text) return std::nullopt;
    return Expr::parse(*text, "p");
}

Distortion make_system_distortion(std::string label, std::function<double(double)> fn,
                                  const std::optional<Expr>& closed, const Grid& grid) {
    Distortion::Fn deriv;
    if (closed) deriv = [e = *closed](double p) { return e.derivative(p); };
    return Distortion::from_function(std::move(label), std::move(fn), std::move(deriv), {},
                                     Provenance::system_derived, grid);
}

void require_same_dimension(const MinimalSignature& sig, int n) {
    if (sig.n() != n)
        throw std::invalid_argument("signature has " + std::to_string(sig.n()) +
                                    " entries but the copula has dimension " + std::to_string(n));
}

}  // namespace

SystemDistortion system_distortion(const MinimalSignature& sig, const CopulaHandle& copula,
                                   const Grid& grid) {
    require_same_dimension(sig, copula.dimension());
    auto fn = [sig, copula](double p) {
        double v = 0.0;
        for (int i = 1; i <= sig.n(); ++i)
            if (sig[i] != 0.0) v += sig[i] * boundary_section_generic(copula, p, i);
        return v;
    };
    auto closed = closed_form_for(sig, copula);
    auto h = make_system_distortion("system(" + sig.render() + "; " + copula.label() + ")", fn,
                                    closed, grid);
    return {std::move(h), sig, copula, std::move(closed)};
}

SystemDistortion durante_system_distortion(const MinimalSignature& sig,
                                           const DuranteGenerator& gen, const Grid& grid) {
    require_same_dimension(sig, gen.n);
    auto fn = [sig, f = gen.f](double p) {
        const double fp = f(p);
        double power = 1.0;
        double v = 0.0;
        for (int k = 1; k <= sig.n(); ++k) {
            v += sig[k] * p * power;
            power *= fp;
        }
        return v;
    };
    std::optional<Expr> closed;
    if (auto f = expr_in_p(gen.expr)) closed = Expr::parse(durante_text(sig, f->render()), "p");
    auto copula = durante_copula(gen);
    auto h = make_system_distortion("durante-system(" + sig.render() + "; f=" + gen.label + ")",
                                    fn, closed, grid);
    return {std::move(h), sig, std::move(copula), std::move(closed)};
}

// ---------------------------------------------------------------------------
// Shape classification

std::string to_string(ShapeVerdict v) {
    switch (v) {
        case ShapeVerdict::starshaped_any_f: return "starshaped_any_f";
        case ShapeVerdict::antistarshaped_any_f: return "antistarshaped_any_f";
        case ShapeVerdict::both_any_f: return "both_any_f";
        case ShapeVerdict::starshaped_if: return "starshaped_if";
        case ShapeVerdict::antistarshaped_if: return "antistarshaped_if";
        case ShapeVerdict::starshaped: return "starshaped";
        case ShapeVerdict::antistarshaped: return "antistarshaped";
        case ShapeVerdict::both: return "both";
        case ShapeVerdict::inconclusive: return "inconclusive";
    }
    return "?";
}

bool ShapeClassification::starshaped() const {
    return verdict == ShapeVerdict::starshaped_any_f || verdict == ShapeVerdict::starshaped ||
           verdict == ShapeVerdict::both_any_f || verdict == ShapeVerdict::both;
}

bool ShapeClassification::antistarshaped() const {
    return verdict == ShapeVerdict::antistarshaped_any_f ||
           verdict == ShapeVerdict::antistarshaped || verdict == ShapeVerdict::both_any_f ||
           verdict == ShapeVerdict::both;
}

ShapeClassification durante_shape_condition(const MinimalSignature& sig,
                                            const DuranteGenerator& gen, const Grid& grid,
                                            const Tolerance& tol) {
    require_same_dimension(sig, gen.n);
    std::vector<double> cond;
    bool all_zero = true;
    for (double p : grid.points()) {
        const double fp = gen.f(p);
        double power = 1.0, s = 0.0;
        for (int k = 1; k <= sig.n() - 1; ++k) {
            s += k * sig[k + 1] * power;
            power *= fp;
        }
        cond.push_back(s);
        all_zero = all_zero && std::abs(s) <= tol.abs_tol;
    }
    ShapeClassification out;
    const auto scan = sign_scan(cond, tol);
    if (all_zero)
        out.verdict = ShapeVerdict::both;
    else if (scan.kind == SignClass::nonnegative)
        out.verdict = ShapeVerdict::starshaped;
    else if (scan.kind == SignClass::nonpositive)
        out.verdict = ShapeVerdict::antistarshaped;
    else {
        out.verdict = ShapeVerdict::inconclusive;
        out.note = "shape condition changes sign at p=" + fmt(grid[*scan.witness_index]);
        out.direct = classify(durante_system_distortion(sig, gen, grid).h, grid);
    }
    return out;
}

namespace {

ShapeVerdict flip(ShapeVerdict v) {
    switch (v) {
        case ShapeVerdict::starshaped_any_f: return ShapeVerdict::antistarshaped_any_f;
        case ShapeVerdict::antistarshaped_any_f: return ShapeVerdict::starshaped_any_f;
        case ShapeVerdict::starshaped_if: return ShapeVerdict::antistarshaped_if;
        case ShapeVerdict::antistarshaped_if: return ShapeVerdict::starshaped_if;
        default: return v;
    }
}

ShapeClassification three_scheme(const Number& a2, const Number& a3) {
    ShapeClassification out;
    if (sign(a3) == 0) {
        const int s = sign(a2);
        out.verdict = s > 0   ? ShapeVerdict::starshaped_any_f
                      : s < 0 ? ShapeVerdict::antistarshaped_any_f
                              : ShapeVerdict::both_any_f;
        out.note = "a3 = 0: the shape condition reduces to the sign of a2";
        return out;
    }
    const Number omega = -a2 / (Number(Rational(2)) * a3);
    out.parameters["omega"] = omega;
    const Number one(Rational(1));
    ShapeVerdict v;
    if (compare(omega, one) >= 0)
        v = ShapeVerdict::antistarshaped_any_f;
    else if (sign(omega) <= 0)
        v = ShapeVerdict::starshaped_any_f;
    else {
        v = ShapeVerdict::starshaped_if;
        out.threshold = omega;
    }
    out.verdict = sign(a3) > 0 ? v : flip(v);
    return out;
}

}  // namespace

ShapeClassification classify_3component(const MinimalSignature& sig) {
    if (sig.n() != 3) throw std::invalid_argument("classify_3component needs n = 3");
    return three_scheme(sig.coefficient(2), sig.coefficient(3));
}

ShapeClassification classify_4component(const MinimalSignature& sig) {
    if (sig.n() != 4) throw std::invalid_argument("classify_4component needs n = 4");
    const Number a2 = sig.coefficient(2), a3 = sig.coefficient(3), a4 = sig.coefficient(4);
    if (sign(a4) == 0) {
        auto out = three_scheme(a2, a3);
        out.note = "a4 = 0: delegated to the three-component scheme" +
                   (out.note.empty() ? std::string() : "; " + out.note);
        return out;
    }
    ShapeClassification out;
    const Number three(Rational(3));
    const Number delta = a3 * a3 - three * a2 * a4;
    out.parameters["delta"] = delta;
    ShapeVerdict v;
    if (sign(delta) <= 0) {
        v = ShapeVerdict::starshaped_any_f;
    } else {
        const Number r = sqrt(delta);
        const Number xa = (-a3 - r) / (three * a4);
        const Number xb = (-a3 + r) / (three * a4);
        const Number x1 = compare(xa, xb) <= 0 ? xa : xb;
        const Number x2 = compare(xa, xb) <= 0 ? xb : xa;
        out.parameters["x1"] = x1;
        out.parameters["x2"] = x2;
        const Number one(Rational(1));
        if (sign(x2) <= 0) {
            v = ShapeVerdict::starshaped_any_f;
        } else if (compare(x2, one) < 0) {
            v = ShapeVerdict::starshaped_if;
            out.threshold = x2;
        } else if (sign(x1) <= 0) {
            v = ShapeVerdict::antistarshaped_any_f;
        } else if (compare(x1, one) < 0) {
            v = ShapeVerdict::antistarshaped_if;
            out.threshold = x1;
        } else {
            v = ShapeVerdict::starshaped_any_f;
        }
    }
    out.verdict = sign(a4) > 0 ? v : flip(v);
    return out;
}

ShapeClassification classify_durante_system(const MinimalSignature& sig,
                                            const DuranteGenerator& gen, const Grid& grid) {
    require_same_dimension(sig, gen.n);
    if (sig.n() != 3 && sig.n() != 4) return durante_shape_condition(sig, gen, grid);
    auto out = sig.n() == 3 ? classify_3component(sig) : classify_4component(sig);
    if (out.verdict != ShapeVerdict::starshaped_if &&
        out.verdict != ShapeVerdict::antistarshaped_if)
        return out;

    double f0;
    try {
        f0 = gen.f(0.0);
    } catch (const DomainError&) {
        f0 = gen.f(grid[0]);
    }
    out.parameters["f(0)"] = Number(f0);
    if (f0 >= out.threshold->value) {
        out.verdict = out.verdict == ShapeVerdict::starshaped_if ? ShapeVerdict::starshaped
                                                                 : ShapeVerdict::antistarshaped;
    } else {
        out.verdict = ShapeVerdict::inconclusive;
        out.note = "f(0) = " + fmt(f0) + " is below the threshold " + out.threshold->render() +
                   "; the closed-form result does not apply";
        out.direct = classify(durante_system_distortion(sig, gen, grid).h, grid);
    }
    return out;
}

DiagParams diag_system_params(const MinimalSignature& sig) {
    const int n = sig.n();
    Number alpha(Rational(0)), beta(Rational(0));
    if (!sig.exact()) alpha = beta = Number(0.0);
    for (int i = 1; i <= n; ++i) {
        const Number a = sig.coefficient(i);
        alpha = alpha + a * Number(Rational(n - i));
        beta = beta + a * Number(Rational(i - 1));
    }
    const Number denom(Rational(n - 1));
    alpha = alpha / denom;
    beta = beta / denom;
    const Number sum = alpha + beta;
    if (sum.exact ? *sum.exact != Rational(1) : std::abs(sum.value - 1.0) > 1e-9)
        throw std::logic_error("alpha + beta != 1");
    return {alpha, beta};
}

ShapeClassification classify_diag(const MinimalSignature& sig, const Diagonal& d,
                                  const Grid& grid) {
    require_same_dimension(sig, d.n);
    const auto params = diag_system_params(sig);
    ShapeClassification out;
    out.parameters["alpha"] = params.alpha;
    out.parameters["beta"] = params.beta;
    if (sign(params.beta) == 0) {
        out.verdict = ShapeVerdict::both;
        out.note = "beta = 0: h_T(p) = p";
        return out;
    }
    std::vector<double> ratio;
    for (double p : grid.points()) ratio.push_back(d.d(p) / p);
    if (first_reversal(ratio, true)) {
        out.verdict = ShapeVerdict::inconclusive;
        out.note = "diagonal is not starshaped on the grid; direct classification attached";
        out.direct = classify(system_distortion(sig, jaworski_copula(d), grid).h, grid);
        return out;
    }
    out.verdict = sign(params.beta) > 0 ? ShapeVerdict::starshaped : ShapeVerdict::antistarshaped;
    return out;
}

ShapeClassification classify_system(const MinimalSignature& sig, const CopulaHandle& copula,
                                    const Grid& grid) {
    if (const auto* d = std::get_if<copula::Durante>(&copula.form))
        return classify_durante_system(sig, d->gen, grid);
    if (const auto* j = std::get_if<copula::Jaworski>(&copula.form))
        return classify_diag(sig, j->diag, grid);
    ShapeClassification out;
    out.direct = classify(system_distortion(sig, copula, grid).h, grid);
    const bool star = out.direct->starshaped, anti = out.direct->antistarshaped;
    out.verdict = star && anti ? ShapeVerdict::both
                  : star       ? ShapeVerdict::starshaped
                  : anti       ? ShapeVerdict::antistarshaped
                               : ShapeVerdict::inconclusive;
    out.note = "no closed-form result for this copula family; classified on the grid";
    return out;
}

Distortion parallel_distortion(const CopulaHandle& dist_copula, const Grid& grid) {
    const int n = dist_copula.dimension();
    auto fn = [dist_copula, n](double p) {
        return 1.0 - dist_copula(std::vector<double>(n, 1.0 - p));
    };
    return Distortion::from_function("parallel(" + dist_copula.label() + ")", fn, {}, {},
                                     Provenance::system_derived, grid);
}

Distortion series_distortion(const CopulaHandle& surv_copula, const Grid& grid) {
    const int n = surv_copula.dimension();
    auto fn = [surv_copula, n](double p) { return surv_copula(std::vector<double>(n, p)); };
    return Distortion::from_function("series(" + surv_copula.label() + ")", fn, {}, {},
                                     Provenance::system_derived, grid);
}

std::string to_string(Advice a) {
    return a == Advice::preserved ? "preserved" : "not_guaranteed";
}

Advice preservation_advice(OrderKind order, const ShapeReport& shape,
                           const ShapeReport& dual_shape) {
    bool ok = false;
    switch (order) {
        case OrderKind::ttt: ok = shape.starshaped; break;
        case OrderKind::ew:
        case OrderKind::dmrl: ok = shape.antistarshaped && shape.strictly_increasing; break;
        case OrderKind::qmit: ok = dual_shape.antistarshaped && shape.strictly_increasing; break;
        case OrderKind::convex_transform:
        case OrderKind::star: ok = true; break;
    }
    return ok ? Advice::preserved : Advice::not_guaranteed;
}

Advice preservation_advice(OrderKind order, const Distortion& h, const Grid& grid) {
    return preservation_advice(order, classify(h, grid), classify(dual(h), grid));
}

}  // namespace storder
