#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "storder/funcalc.hpp"
#include "storder/numerics.hpp"

namespace storder {

enum class Provenance { expression, system_derived, builtin };

std::string to_string(Provenance p);

/// An increasing map h: [0,1] -> [0,1] with h(0) = 0 and h(1) = 1.
///
/// Applied to a survival function it yields the survival function of the
/// distorted variable, F̄_h = h(F̄). Instances are only created through the
/// validating factories, so every Distortion in circulation has passed the
/// endpoint and grid-monotonicity checks.
class Distortion {
public:
    using Fn = std::function<double(double)>;

    static Distortion identity();
    /// p^k, k > 0.
    static Distortion power(double k);
    /// 1 - (1-p)^k, k > 0.
    static Distortion dual_power(double k);
    /// Validates an expression in one variable.
    static Distortion from_expr(const Expr& expr, const Grid& grid = Grid::uniform());
    /// Validates an arbitrary function. `derivative` and `inverse` are
    /// optional; numerical fallbacks are used when they are empty.
    static Distortion from_function(std::string label, Fn fn, Fn derivative = {},
                                    Fn inverse = {}, Provenance provenance = Provenance::builtin,
                                    const Grid& grid = Grid::uniform());

    double operator()(double p) const;
    double derivative(double p) const;
    /// Generalized left-continuous inverse inf{p : h(p) >= y}; y clamped to [0,1].
    double inverse(double y) const;
    /// u with h*(u) = p for the dual h*(u) = 1 - h(1-u), i.e. 1 - h^-1(1-p),
    /// computed without the cancellation in 1 - p where a closed form exists.
    double dual_inverse(double p) const;
    /// h'(1-u), the derivative of the dual at u.
    double dual_derivative(double u) const;

    bool strictly_increasing() const noexcept;
    Provenance provenance() const noexcept;
    const std::string& label() const noexcept;
    const std::optional<Expr>& expr() const noexcept;

    /// True when both handles share the same underlying function object.
    bool same_as(const Distortion& other) const noexcept { return impl_ == other.impl_; }

    struct Impl;

private:
    explicit Distortion(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    static Distortion make_validated(std::shared_ptr<Impl> impl, const Grid& grid);

    std::shared_ptr<const Impl> impl_;

    friend Distortion dual(const Distortion& h);
    friend Distortion compose_on_survival(const Distortion& h1, const Distortion& h2);
};

/// Validates fn as a distortion (endpoints and monotonicity on grid).
Distortion validate_distortion(const Expr& fn, const Grid& grid = Grid::uniform());

/// h*(p) = 1 - h(1 - p).
Distortion dual(const Distortion& h);

/// p -> h2(h1(p)): distorting by h1 then by h2.
Distortion compose_on_survival(const Distortion& h1, const Distortion& h2);

inline double inverse(const Distortion& h, double y) { return h.inverse(y); }

struct ShapeReport {
    bool convex = false;
    bool concave = false;
    bool starshaped = false;
    bool antistarshaped = false;
    bool strictly_increasing = false;
    /// Failed property name -> grid point where the failure was observed.
    std::map<std::string, double> witnesses;
};

/// Shape classification on a grid: starshaped / antistarshaped from the
/// monotonicity of h(p)/p, convex / concave from the monotonicity of chord
/// slopes over {0} ∪ grid ∪ {1}.
ShapeReport classify(const Distortion& h, const Grid& grid = Grid::uniform(),
                     const Tolerance& tol = kScanTolerance);

}  // namespace storder
