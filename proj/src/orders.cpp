#include "storder/orders.hpp"

#include <cmath>
#include <stdexcept>

namespace storder {

std::string to_string(OrderKind kind) {
    switch (kind) {
        case OrderKind::ttt: return "ttt";
        case OrderKind::ew: return "ew";
        case OrderKind::dmrl: return "dmrl";
        case OrderKind::qmit: return "qmit";
        case OrderKind::convex_transform: return "convex_transform";
        case OrderKind::star: return "star";
    }
    return "?";
}

OrderKind parse_order_kind(std::string_view text) {
    if (text == "ttt") return OrderKind::ttt;
    if (text == "ew") return OrderKind::ew;
    if (text == "dmrl") return OrderKind::dmrl;
    if (text == "qmit") return OrderKind::qmit;
    if (text == "c" || text == "convex" || text == "convex_transform" ||
        text == "convex-transform")
        return OrderKind::convex_transform;
    if (text == "star") return OrderKind::star;
    throw std::invalid_argument("unknown order '" + std::string(text) + "'");
}

const std::array<OrderKind, 6>& all_orders() {
    static const std::array<OrderKind, 6> kinds{OrderKind::ttt,  OrderKind::ew,
                                                OrderKind::dmrl, OrderKind::qmit,
                                                OrderKind::convex_transform, OrderKind::star};
    return kinds;
}

namespace {

// Segments touching 0 or 1 may carry an endpoint singularity of q'.
double integrate_q(const std::function<double(double)>& fn, double a, double b) {
    if (a == 0.0 || b == 1.0) return integrate_singular(fn, a, b, kTransformQuadrature.tol);
    return integrate(fn, a, b, kTransformQuadrature);
}

// Integrable singularities of q' at 0 or 1 can overflow once t is within
// rounding distance of the endpoint; the mass dropped there is far below the
// quadrature tolerance.
constexpr double kEdge = 1e-12;

bool near_edge(double t) { return t <= kEdge || t >= 1.0 - kEdge; }

// The same applies to arguments that round onto the endpoint and leave the
// domain of the expression (ln(1-p) at p = 1).
template <class Fn>
double edge_guard(double t, const Fn& fn) {
    try {
        const double v = fn();
        return std::isfinite(v) || !near_edge(t) ? v : 0.0;
    } catch (const DomainError&) {
        if (near_edge(t)) return 0.0;
        throw;
    }
}

std::function<double(double)> survival_weighted(const Distribution& x) {
    return [&x](double t) {
        return edge_guard(t, [&] { return (1.0 - t) * x.quantile_derivative(t); });
    };
}

std::function<double(double)> cdf_weighted(const Distribution& x) {
    return [&x](double t) { return edge_guard(t, [&] { return t * x.quantile_derivative(t); }); };
}

std::vector<double> forward_curve(const std::function<double(double)>& fn, double start,
                                  const Grid& grid) {
    std::vector<double> out(grid.size());
    double acc = start;
    double prev = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        acc += integrate_q(fn, prev, grid[i]);
        out[i] = acc;
        prev = grid[i];
    }
    return out;
}

std::vector<double> backward_curve(const std::function<double(double)>& fn, const Grid& grid) {
    std::vector<double> out(grid.size());
    double acc = 0.0;
    double prev = 1.0;
    for (std::size_t k = grid.size(); k-- > 0;) {
        acc += integrate_q(fn, grid[k], prev);
        out[k] = acc;
        prev = grid[k];
    }
    return out;
}

bool share_distortion(const Distribution& x, const Distribution& y) {
    const Distortion* hx = x.distortion();
    const Distortion* hy = y.distortion();
    return hx && hy && (hx->same_as(*hy) || hx->label() == hy->label());
}

void level_check(OrderVerdict& v, const std::vector<double>& vx, const std::vector<double>& vy) {
    for (std::size_t i = 0; i < v.grid.size(); ++i) {
        const double diff = vy[i] - vx[i];
        v.curve.push_back({v.grid[i], vx[i], vy[i], diff});
        if (diff < -scan_slack(vx[i], vy[i], v.tol)) v.witnesses.push_back({v.grid[i], diff});
    }
}

// Scans num/den for the required direction, dropping 0/0 and non-finite points.
void ratio_check(OrderVerdict& v, const std::vector<double>& vx, const std::vector<double>& vy,
                 bool y_over_x, bool increasing) {
    std::vector<double> kept_p, kept;
    for (std::size_t i = 0; i < v.grid.size(); ++i) {
        const double num = y_over_x ? vy[i] : vx[i];
        const double den = y_over_x ? vx[i] : vy[i];
        const double r = num / den;
        if (den == 0.0 || !std::isfinite(r)) {
            v.excluded.push_back(v.grid[i]);
            continue;
        }
        v.curve.push_back({v.grid[i], vx[i], vy[i], r});
        kept_p.push_back(v.grid[i]);
        kept.push_back(r);
    }
    for (std::size_t i = 0; i + 1 < kept.size(); ++i) {
        const double step = increasing ? kept[i + 1] - kept[i] : kept[i] - kept[i + 1];
        if (step < -scan_slack(kept[i], kept[i + 1], v.tol))
            v.witnesses.push_back({kept_p[i + 1], step});
    }
    if (!kept.empty()) {
        const auto scan = monotone_scan(kept, v.tol);
        v.trend = scan.kind;
        if (scan.witness_index) v.turning_point = kept_p[*scan.witness_index];
    }
}

}  // namespace

double ttt_transform(const Distribution& x, double p) {
    return x.support_low() + integrate_q(survival_weighted(x), 0.0, p);
}

double excess_wealth(const Distribution& x, double p) {
    return integrate_q(survival_weighted(x), p, 1.0);
}

double mit_transform(const Distribution& x, double p) {
    return integrate_q(cdf_weighted(x), 0.0, p);
}

std::vector<double> ttt_curve(const Distribution& x, const Grid& grid) {
    return forward_curve(survival_weighted(x), x.support_low(), grid);
}

std::vector<double> excess_wealth_curve(const Distribution& x, const Grid& grid) {
    return backward_curve(survival_weighted(x), grid);
}

std::vector<double> mit_curve(const Distribution& x, const Grid& grid) {
    return forward_curve(cdf_weighted(x), 0.0, grid);
}

OrderVerdict check_order(const Distribution& x, const Distribution& y, OrderKind kind,
                         const Grid& grid, const Tolerance& tol) {
    OrderVerdict v{.kind = kind, .grid = grid, .tol = tol};
    auto sample = [&](auto&& fn) {
        std::pair<std::vector<double>, std::vector<double>> out;
        for (double p : grid.points()) {
            out.first.push_back(fn(x, p));
            out.second.push_back(fn(y, p));
        }
        return out;
    };

    switch (kind) {
        case OrderKind::ttt:
            level_check(v, ttt_curve(x, grid), ttt_curve(y, grid));
            break;
        case OrderKind::ew:
            level_check(v, excess_wealth_curve(x, grid), excess_wealth_curve(y, grid));
            break;
        case OrderKind::dmrl: {
            const auto ex = excess_wealth_curve(x, grid);
            const auto ey = excess_wealth_curve(y, grid);
            ratio_check(v, ex, ey, true, true);
            for (std::size_t i = 0; i < grid.size(); ++i) {
                const double r = y.quantile_derivative(grid[i]) / x.quantile_derivative(grid[i]);
                v.integral_form.push_back(ey[i] - r * ex[i]);
            }
            const bool integral_ok =
                sign_scan(v.integral_form, tol).kind == SignClass::nonnegative;
            v.integral_agrees = integral_ok == v.witnesses.empty();
            break;
        }
        case OrderKind::qmit:
            ratio_check(v, mit_curve(x, grid), mit_curve(y, grid), false, false);
            break;
        case OrderKind::convex_transform: {
            auto [dx, dy] =
                sample([](const Distribution& d, double p) { return d.quantile_derivative(p); });
            ratio_check(v, dx, dy, true, true);
            break;
        }
        case OrderKind::star: {
            auto [qx, qy] = sample([](const Distribution& d, double p) { return d.quantile(p); });
            ratio_check(v, qx, qy, true, true);
            break;
        }
    }
    v.holds = v.witnesses.empty();
    return v;
}

double dmrl_integral(const Distribution& x, const Distribution& y, double p) {
    const double r = y.quantile_derivative(p) / x.quantile_derivative(p);
    if (!std::isfinite(r))
        throw DegenerateDensityError("dmrl integral: density ratio not finite at p=" +
                                     std::to_string(p));
    auto fn = [&](double t) {
        return edge_guard(t, [&] {
            return (1.0 - t) * (y.quantile_derivative(t) - r * x.quantile_derivative(t));
        });
    };
    return integrate_q(fn, p, 1.0);
}

std::vector<double> dmrl_integral_curve(const Distribution& x, const Distribution& y,
                                        const Grid& grid) {
    std::vector<double> out;
    out.reserve(grid.size());
    for (double p : grid.points()) out.push_back(dmrl_integral(x, y, p));
    return out;
}

double transform_slope(const Distribution& x, const Distribution& y, double s) {
    const bool strip = share_distortion(x, y);
    const Distribution& xa = strip ? *x.base() : x;
    const Distribution& ya = strip ? *y.base() : y;
    const double F = xa.cdf(s);
    if (F <= 0.0 || F >= 1.0) return 0.0;
    return xa.density(s) * ya.quantile_derivative(F);
}

double qmit_xspace_integral(const Distribution& x, const Distribution& y, double t) {
    const double lo = x.support_low();
    if (t <= lo) return 0.0;
    const double slope_t = transform_slope(x, y, t);
    auto fn = [&](double s) {
        const double F = x.cdf(s);
        if (F <= 0.0) return 0.0;
        return (slope_t - transform_slope(x, y, s)) * F;
    };
    return integrate(fn, lo, t, kTransformQuadrature);
}

ImplicationReport order_implication_check(const Distribution& x, const Distribution& y,
                                          const Grid& grid, const Tolerance& tol) {
    ImplicationReport report;
    for (OrderKind k : all_orders()) report.verdicts.emplace(k, check_order(x, y, k, grid, tol));
    auto holds = [&](OrderKind k) { return report.verdicts.at(k).holds; };
    auto require = [&](OrderKind from, OrderKind to) {
        if (holds(from) && !holds(to))
            report.alarms.push_back(to_string(from) + " holds but " + to_string(to) +
                                    " is violated");
    };
    require(OrderKind::convex_transform, OrderKind::dmrl);
    require(OrderKind::convex_transform, OrderKind::qmit);
    require(OrderKind::qmit, OrderKind::star);
    require(OrderKind::convex_transform, OrderKind::star);
    return report;
}

PairScan dmrl_pair_scan(const Distribution& x, const Distribution& y, std::size_t count,
                        const Tolerance& tol) {
    const Grid grid = Grid::uniform(count);
    const auto ex = excess_wealth_curve(x, grid);
    const auto ey = excess_wealth_curve(y, grid);
    std::vector<double> dx(grid.size()), dy(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        dx[i] = x.quantile_derivative(grid[i]);
        dy[i] = y.quantile_derivative(grid[i]);
    }
    PairScan out;
    bool first = true;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (std::size_t j = i; j < grid.size(); ++j) {
            const double value = ey[j] * dx[i] - ex[j] * dy[i];
            ++out.points;
            if (first || value < out.min_value) {
                out.min_value = value;
                out.min_p = grid[i];
                out.min_q = grid[j];
                first = false;
            }
        }
    }
    out.nonnegative = out.min_value >= -tol.abs_tol;
    return out;
}

}  // namespace storder
