#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "storder/error.hpp"

namespace storder {

/// A parsed real function of one variable.
///
/// Grammar (lowest to highest precedence):
///
///     expr     := term (('+' | '-') term)*
///     term     := unary (('*' | '/') unary)*
///     unary    := '-' unary | power
///     power    := primary ('^' exponent)?        right-associative
///     exponent := '-' exponent | power
///     primary  := number | 'e' | VAR | '(' expr ')'
///               | ('exp' | 'ln' | 'sqrt') '(' expr ')'
///               | ('min' | 'max') '(' expr (',' expr)* ')'
///               | 'piece' '(' VAR '<=' c ':' expr (';' VAR '<=' c ':' expr)*
///                            ';' 'else' ':' expr ')'
///
/// Piecewise guards `c` are constant expressions and must be strictly
/// increasing; the first branch whose guard holds is selected. Evaluation
/// raises DomainError (with the offending node's SourceSpan) on ln of a
/// non-positive value, sqrt of a negative value, division by zero, 0 to a
/// negative power, or any non-finite intermediate.
///
/// Expr is immutable and cheap to copy; evaluation is thread-safe.
class Expr {
public:
    struct Node;

    /// Parses with the variable named either "p" or "x" (whichever appears).
    static Expr parse(std::string_view text);
    /// Parses with an explicitly declared variable name.
    static Expr parse(std::string_view text, std::string_view variable);

    double eval(double value) const;
    double operator()(double value) const { return eval(value); }

    /// Value and exact first derivative by forward-mode dual evaluation.
    /// Inside a piecewise node the derivative is that of the selected branch.
    /// The derivative may be infinite (e.g. sqrt at 0); the value never is.
    std::pair<double, double> eval_with_derivative(double value) const;
    double derivative(double value) const { return eval_with_derivative(value).second; }

    /// The expression in v' = 1 - v, built so that 1 - (1 - v') evaluates as
    /// v' exactly. Keeps precision of e.g. ln(1 - p) for p near 1. Not
    /// available for piecewise expressions.
    std::optional<Expr> reflected() const;

    /// Canonical text that parses back to an equivalent expression.
    std::string render() const;

    const std::string& variable() const noexcept { return variable_; }
    const std::string& source() const noexcept { return source_; }

    /// Guard values of every piecewise node, sorted.
    std::vector<double> breakpoints() const;

private:
    friend double piecewise_continuity_gap(const Expr& expr);
    Expr(std::shared_ptr<const Node> root, std::string variable, std::string source);

    std::shared_ptr<const Node> root_;
    std::string variable_;
    std::string source_;
};

inline Expr parse(std::string_view text) { return Expr::parse(text); }
inline double eval(const Expr& expr, double value) { return expr.eval(value); }

/// Largest |left - right| between adjacent branches of every piecewise node,
/// each side evaluated at its guard (left branch at c, right branch's
/// formula also at c). Zero for expressions without piecewise nodes.
double piecewise_continuity_gap(const Expr& expr);

}  // namespace storder
