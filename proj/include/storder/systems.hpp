#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <boost/rational.hpp>

#include "storder/copulas.hpp"
#include "storder/distortions.hpp"
#include "storder/orders.hpp"

namespace storder {

using Rational = boost::rational<long long>;

/// A real number that also carries its exact rational value when known.
struct Number {
    std::optional<Rational> exact;
    double value = 0.0;

    Number() = default;
    Number(Rational r);  // NOLINT(google-explicit-constructor)
    explicit Number(double v) : value(v) {}

    /// "num/den" (or "num" when den = 1) when exact, else %.17g.
    std::string render() const;
};

Number operator+(const Number& a, const Number& b);
Number operator-(const Number& a, const Number& b);
Number operator*(const Number& a, const Number& b);
Number operator/(const Number& a, const Number& b);
Number operator-(const Number& a);
/// -1, 0 or +1; exact when possible.
int sign(const Number& a);
/// sign(a - b).
int compare(const Number& a, const Number& b);
/// Square root, exact when the argument is the square of a rational.
Number sqrt(const Number& a);

/// Parses "3", "-2", "3/4" or a decimal such as "0.25" into an exact rational.
std::optional<Rational> parse_rational(std::string_view text);

/// Coefficients (a_1, ..., a_n) of the series-system mixture h_T = Σ a_i h_{1:i}.
class MinimalSignature {
public:
    /// Comma-separated entries, e.g. "2,0,-2,1" or "1/2,1/2".
    static MinimalSignature parse(std::string_view text);
    static MinimalSignature from_rationals(std::vector<Rational> a);
    static MinimalSignature from_values(std::vector<double> a);

    int n() const noexcept { return static_cast<int>(values_.size()); }
    double operator[](int i) const { return values_.at(i - 1); }  // 1-based
    Number coefficient(int i) const;                              // 1-based
    const std::vector<double>& values() const noexcept { return values_; }
    bool exact() const noexcept { return exact_.has_value(); }
    std::string render() const;

private:
    MinimalSignature() = default;
    void validate() const;
    std::vector<double> values_;
    std::optional<std::vector<Rational>> exact_;
};

struct SystemDistortion {
    Distortion h;
    MinimalSignature signature;
    CopulaHandle copula;
    /// Expression for h_T when the copula's generator or diagonal is itself
    /// an expression.
    std::optional<Expr> closed_form;
};

/// h_T(p) = Σ a_i C(p, ..(i).., p, 1, ..., 1), with C evaluated generically.
SystemDistortion system_distortion(const MinimalSignature& sig, const CopulaHandle& copula,
                                   const Grid& grid = Grid::uniform());

/// h_T(p) = Σ a_k p f(p)^(k-1).
SystemDistortion durante_system_distortion(const MinimalSignature& sig,
                                           const DuranteGenerator& gen,
                                           const Grid& grid = Grid::uniform());

enum class ShapeVerdict {
    starshaped_any_f,
    antistarshaped_any_f,
    /// h_T(p) = p: starshaped and antistarshaped for every generator.
    both_any_f,
    starshaped_if,      // when f(0) >= threshold
    antistarshaped_if,  // when f(0) >= threshold
    starshaped,         // for the concrete generator or diagonal at hand
    antistarshaped,
    both,
    inconclusive,
};

std::string to_string(ShapeVerdict v);

struct ShapeClassification {
    ShapeVerdict verdict = ShapeVerdict::inconclusive;
    std::optional<Number> threshold;
    /// Named constants: omega, delta, x1, x2, alpha, beta, ...
    std::map<std::string, Number> parameters;
    /// Grid classification of h_T, attached where the closed-form result is
    /// silent.
    std::optional<ShapeReport> direct;
    std::string note;

    bool starshaped() const;
    bool antistarshaped() const;
};

/// Sign of Σ_{k=1}^{n-1} k a_{k+1} f(p)^(k-1) over the grid.
ShapeClassification durante_shape_condition(const MinimalSignature& sig,
                                            const DuranteGenerator& gen,
                                            const Grid& grid = Grid::uniform(),
                                            const Tolerance& tol = kScanTolerance);

/// Branch table for n = 3 with omega = -a_2 / (2 a_3); a_3 = 0 reduces to the
/// sign of a_2.
ShapeClassification classify_3component(const MinimalSignature& sig);

/// Branch table for n = 4 with Δ = a_3^2 - 3 a_2 a_4 and the roots of
/// 3 a_4 x^2 + 2 a_3 x + a_2 = 0; a_4 = 0 delegates to the n = 3 table.
ShapeClassification classify_4component(const MinimalSignature& sig);

/// Closed-form rule for n in {3, 4} resolved against a concrete generator (the
/// f(0) thresholds); other n use durante_shape_condition. Uncovered
/// branches come back inconclusive with a direct classification attached.
ShapeClassification classify_durante_system(const MinimalSignature& sig,
                                            const DuranteGenerator& gen,
                                            const Grid& grid = Grid::uniform());

struct DiagParams {
    Number alpha;
    Number beta;
};

/// alpha = Σ a_i (n-i)/(n-1), beta = Σ a_i (i-1)/(n-1).
DiagParams diag_system_params(const MinimalSignature& sig);

/// h_T = alpha p + beta d(p) is starshaped [antistarshaped] iff d is
/// starshaped and beta > 0 [beta < 0].
ShapeClassification classify_diag(const MinimalSignature& sig, const Diagonal& d,
                                  const Grid& grid = Grid::uniform());

/// Dispatches on the copula family: Durante and diagonal copulas use their
/// closed-form results, every other family is classified directly on the grid.
ShapeClassification classify_system(const MinimalSignature& sig, const CopulaHandle& copula,
                                    const Grid& grid = Grid::uniform());

/// h(p) = 1 - Ĉ(1-p, ..., 1-p) for a distributional copula Ĉ.
Distortion parallel_distortion(const CopulaHandle& dist_copula,
                               const Grid& grid = Grid::uniform());
/// g(p) = C(p, ..., p) for a survival copula C.
Distortion series_distortion(const CopulaHandle& surv_copula, const Grid& grid = Grid::uniform());

enum class Advice { preserved, not_guaranteed };
std::string to_string(Advice a);

/// Whether a distortion with the given shape (and dual shape) preserves the
/// order: ttt needs starshaped h; ew, dmrl and qmit need strictly increasing h
/// of the matching class.
Advice preservation_advice(OrderKind order, const ShapeReport& shape,
                           const ShapeReport& dual_shape);
Advice preservation_advice(OrderKind order, const Distortion& h,
                           const Grid& grid = Grid::uniform());

}  // namespace storder
