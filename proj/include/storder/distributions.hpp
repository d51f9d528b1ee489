#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>

#include "storder/distortions.hpp"
#include "storder/funcalc.hpp"
#include "storder/numerics.hpp"

namespace storder {

struct DistributionSpec;

namespace spec {

struct Exponential {
    double rate = 1.0;
};
/// Quantile function given directly as an expression in p.
struct QuantileExpr {
    Expr q;
};
/// F(x) = 1 - exp(-psi(x)) with psi increasing and unbounded on [0, inf).
struct HazardExpr {
    Expr psi;
};
struct Distorted {
    std::shared_ptr<const DistributionSpec> base;
    Distortion h;
};

}  // namespace spec

struct DistributionSpec {
    std::variant<spec::Exponential, spec::QuantileExpr, spec::HazardExpr, spec::Distorted> form;
};

/// A non-negative lifetime represented by its quantile function on (0,1).
///
/// Immutable and cheap to copy. The mean is computed on first use and cached.
class Distribution {
public:
    struct Model;

    double quantile(double p) const;
    /// q'(p), exact where the representation allows it.
    double quantile_derivative(double p) const;
    /// q(1 - s) and q'(1 - s), accurate for small s where the form allows.
    double upper_quantile(double s) const;
    double upper_quantile_derivative(double s) const;

    double cdf(double x) const;
    double survival(double x) const { return 1.0 - cdf(x); }
    /// f(x) in x-space.
    double density(double x) const;
    /// f(q(p)) = 1 / q'(p). Throws DegenerateDensityError if q'(p) is zero or
    /// not finite.
    double density_at_quantile(double p) const;

    /// Limit of q at 0 (q(eps) when q(0) is not evaluable).
    double support_low() const noexcept;
    /// Integral of q over (0,1). Throws InfiniteMeanError when the upper tail
    /// does not settle.
    double mean() const;
    bool finite_mean() const;

    const std::string& label() const noexcept;

    /// For distorted distributions: the undistorted base and the distortion.
    const Distribution* base() const noexcept;
    const Distortion* distortion() const noexcept;

    explicit Distribution(std::shared_ptr<const Model> model);

private:
    std::shared_ptr<const Model> model_;
};

/// Builds and validates (monotone, non-negative quantile on grid).
Distribution build(const DistributionSpec& spec, const Grid& grid = Grid::uniform());

Distribution exponential(double rate);
Distribution from_quantile(const Expr& q, const Grid& grid = Grid::uniform());
Distribution from_hazard(const Expr& psi, const Grid& grid = Grid::uniform());

/// q_h(p) = q(1 - h^{-1}(1 - p)): survival function h(F̄).
Distribution distort(const Distribution& x, const Distortion& h);

inline double cdf(const Distribution& x, double v) { return x.cdf(v); }
inline double survival(const Distribution& x, double v) { return x.survival(v); }
inline double density_at_quantile(const Distribution& x, double p) {
    return x.density_at_quantile(p);
}
inline double mean(const Distribution& x) { return x.mean(); }

}  // namespace storder
