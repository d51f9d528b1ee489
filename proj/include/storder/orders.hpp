#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "storder/distributions.hpp"
#include "storder/numerics.hpp"

namespace storder {

enum class OrderKind { ttt, ew, dmrl, qmit, convex_transform, star };

std::string to_string(OrderKind kind);
/// Accepts "ttt", "ew", "dmrl", "qmit", "c" / "convex" / "convex_transform", "star".
OrderKind parse_order_kind(std::string_view text);
const std::array<OrderKind, 6>& all_orders();

/// Quadrature settings used by every order functional.
inline constexpr QuadratureOptions kTransformQuadrature{{1e-14, 1e-12}, 90, 20000};

/// support_low + ∫_0^p (1-t) q'(t) dt, i.e. ∫_0^{q(p)} F̄(x) dx.
double ttt_transform(const Distribution& x, double p);
/// ∫_p^1 (1-t) q'(t) dt.
double excess_wealth(const Distribution& x, double p);
/// ∫_0^p t q'(t) dt.
double mit_transform(const Distribution& x, double p);

/// The same transforms at every grid point, accumulated segment by segment.
std::vector<double> ttt_curve(const Distribution& x, const Grid& grid);
std::vector<double> excess_wealth_curve(const Distribution& x, const Grid& grid);
std::vector<double> mit_curve(const Distribution& x, const Grid& grid);

struct Witness {
    double p;
    double margin;  // negative: size of the violation
};

struct CurvePoint {
    double p;
    double value_x;
    double value_y;
    double functional;
};

/// Result of comparing X and Y in one order on a grid.
///
/// Level orders (ttt, ew) compare value_y - value_x against zero. Ratio
/// orders (dmrl, qmit, convex_transform, star) scan the functional for the
/// required monotonicity; a witness is the right end of every adjacent pair
/// that moves the wrong way by more than the scan slack.
struct OrderVerdict {
    OrderKind kind;
    bool holds = true;
    std::vector<Witness> witnesses{};
    std::vector<CurvePoint> curve{};
    Grid grid;
    Tolerance tol;
    /// Grid points dropped because a ratio was 0/0 or not finite.
    std::vector<double> excluded{};
    /// Ratio orders: monotone_scan classification of the functional and,
    /// when it is "neither", the grid point where the trend turns.
    std::optional<Monotonicity> trend{};
    std::optional<double> turning_point{};
    /// dmrl only: the integral form ew_Y(p) - r(p) ew_X(p) evaluated from the
    /// same curves, and whether its sign agrees with the ratio verdict.
    std::vector<double> integral_form{};
    std::optional<bool> integral_agrees{};
};

OrderVerdict check_order(const Distribution& x, const Distribution& y, OrderKind kind,
                         const Grid& grid = Grid::uniform(),
                         const Tolerance& tol = kScanTolerance);

/// I(p) = ∫_p^1 (1-t) [q_Y'(t) - (q_Y'(p)/q_X'(p)) q_X'(t)] dt, computed as a
/// single quadrature. X ≤_dmrl Y iff I(p) >= 0 for all p.
double dmrl_integral(const Distribution& x, const Distribution& y, double p);
std::vector<double> dmrl_integral_curve(const Distribution& x, const Distribution& y,
                                        const Grid& grid);

/// Î(t) = ∫_0^t [a'(t) - a'(s)] F_X(s) ds with a = q_Y ∘ F_X, evaluated in
/// x-space. When X and Y carry the same distortion, a is computed from the
/// undistorted pair (the distortion cancels in q_Y ∘ F_X) while the weight
/// F_X stays distorted.
double qmit_xspace_integral(const Distribution& x, const Distribution& y, double t);

/// a'(s) = f_X(s) q_Y'(F_X(s)) with the same common-distortion handling.
double transform_slope(const Distribution& x, const Distribution& y, double s);

struct ImplicationReport {
    std::map<OrderKind, OrderVerdict> verdicts;
    /// Human-readable descriptions of violated implications
    /// (c ⇒ dmrl, c ⇒ qmit, qmit ⇒ star, c ⇒ star).
    std::vector<std::string> alarms;
};

ImplicationReport order_implication_check(const Distribution& x, const Distribution& y,
                                          const Grid& grid = Grid::uniform(),
                                          const Tolerance& tol = kScanTolerance);

/// Two-parameter dmrl criterion scanned over 0 < p <= q < 1 on a coarse
/// grid: L(p,q) = ew_Y(q) q_X'(p) - ew_X(q) q_Y'(p) must be non-negative.
struct PairScan {
    std::size_t points = 0;
    double min_value = 0.0;
    double min_p = 0.0;
    double min_q = 0.0;
    bool nonnegative = true;
};

PairScan dmrl_pair_scan(const Distribution& x, const Distribution& y, std::size_t count = 32,
                        const Tolerance& tol = kScanTolerance);

}  // namespace storder
