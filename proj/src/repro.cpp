#include "storder/repro.hpp"

#include <stdexcept>

#include <boost/math/tools/roots.hpp>

#include "storder/specs.hpp"

namespace storder {

namespace fixtures {

std::string durante_copula_spec(int n) {
    return std::string("durante:f=") + kDuranteGenerator + ",n=" + std::to_string(n);
}

std::string diagonal_copula_spec(const char* d, int n) {
    return std::string("diagonal:d=") + d + ",n=" + std::to_string(n);
}

}  // namespace fixtures

namespace {

constexpr std::array<std::pair<ReproTarget, const char*>, 7> kNames{{
    {ReproTarget::ce02, "ce02"},
    {ReproTarget::ce01, "ce01"},
    {ReproTarget::ex_durante_1, "ex_durante_1"},
    {ReproTarget::ex_durante_2, "ex_durante_2"},
    {ReproTarget::ex_diag_5comp, "ex_diag_5comp"},
    {ReproTarget::ex_3of4, "ex_3of4"},
    {ReproTarget::ex_qmit, "ex_qmit"},
}};

Table sampled(std::string name, std::string functional, const Grid& grid, const char* axis,
              const std::function<double(double)>& fn) {
    Table t{std::move(name), functional + " on " + grid.describe(), {axis, "value"}, {}};
    for (double p : grid.points()) t.rows.push_back({p, fn(p)});
    return t;
}

// Root of fn in [a, b], where fn(a) and fn(b) have opposite signs.
double refine_root(const std::function<double(double)>& fn, double a, double b) {
    boost::uintmax_t iterations = 100;
    auto tol = [](double lo, double hi) { return hi - lo <= 1e-12; };
    const auto [lo, hi] = boost::math::tools::toms748_solve(fn, a, b, tol, iterations);
    return 0.5 * (lo + hi);
}

Reproduction reproduce_ce02(const Grid& grid) {
    const auto x = parse_distribution(fixtures::kDmrlX, grid);
    const auto y = parse_distribution(fixtures::kDmrlY, grid);
    const auto h = parse_distortion(fixtures::kDmrlH, grid);
    const auto xh = distort(x, h), yh = distort(y, h);

    Reproduction r{ReproTarget::ce02, {}, json::object()};
    r.tables.push_back(sampled("s", "s(p) = f(F^-1(p)) / g(G^-1(p))", grid, "p", [&](double p) {
        return x.density_at_quantile(p) / y.density_at_quantile(p);
    }));
    const auto i_curve = dmrl_integral_curve(x, y, grid);
    const auto ih_curve = dmrl_integral_curve(xh, yh, grid);
    Table ti{"I", "dmrl integral I(p) of the undistorted pair on " + grid.describe(), {"p", "value"}, {}};
    Table tih{"I_h", "dmrl integral I_h(p) of the pair distorted by " + h.label() + " on " +
                         grid.describe(),
              {"p", "value"}, {}};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        ti.rows.push_back({grid[i], i_curve[i]});
        tih.rows.push_back({grid[i], ih_curve[i]});
    }
    r.tables.push_back(std::move(ti));
    r.tables.push_back(std::move(tih));

    const auto c = check_order(x, y, OrderKind::convex_transform, grid);
    const auto d = check_order(x, y, OrderKind::dmrl, grid);
    const auto dh = check_order(xh, yh, OrderKind::dmrl, grid);

    double i_min = INFINITY;
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (grid[i] >= 0.01 && grid[i] <= 0.99) i_min = std::min(i_min, i_curve[i]);

    json crossing = nullptr;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        if (ih_curve[i] < 0.0 && ih_curve[i + 1] >= 0.0) {
            crossing = refine_root([&](double p) { return dmrl_integral(xh, yh, p); }, grid[i],
                                   grid[i + 1]);
            break;
        }
    }
    r.summary = {{"x", fixtures::kDmrlX},
                 {"y", fixtures::kDmrlY},
                 {"h", h.label()},
                 {"convex_transform_holds", c.holds},
                 {"s_turning_point", c.turning_point ? json(*c.turning_point) : json(nullptr)},
                 {"dmrl_holds", d.holds},
                 {"I_min_on_0.01_0.99", i_min},
                 {"dmrl_h_holds", dh.holds},
                 {"I_h_sign_change", crossing}};
    return r;
}

Reproduction reproduce_ce01() {
    const auto grid = Grid::uniform();
    const auto x = parse_distribution(std::string("hazard:") + fixtures::kHazardPsi, grid);
    const auto y = parse_distribution(fixtures::kQmitY, grid);
    const auto h = parse_distortion(fixtures::kQmitH, grid);
    const auto xh = distort(x, h), yh = distort(y, h);

    Reproduction r{ReproTarget::ce01, {}, json::object()};
    Table t{"I_hat_h",
            "x-space qmit integral of the pair distorted by " + h.label() +
                " on t = k/200, k = 1..400",
            {"t", "value"}, {}};
    double min_value = INFINITY, min_t = 0.0;
    json negative = json::array();
    std::optional<double> neg_lo, neg_hi;
    for (double tv : qmit_t_grid()) {
        const double v = qmit_xspace_integral(xh, yh, tv);
        t.rows.push_back({tv, v});
        if (v < min_value) min_value = v, min_t = tv;
        if (v < 0.0) {
            if (!neg_lo) neg_lo = tv;
            neg_hi = tv;
        }
    }
    r.tables.push_back(std::move(t));
    const auto q = check_order(x, y, OrderKind::qmit, grid);
    const auto qh = check_order(xh, yh, OrderKind::qmit, grid);
    r.summary = {{"x", std::string("hazard:") + fixtures::kHazardPsi},
                 {"y", fixtures::kQmitY},
                 {"h", h.label()},
                 {"qmit_holds", q.holds},
                 {"qmit_h_holds", qh.holds},
                 {"I_hat_h_min", min_value},
                 {"I_hat_h_argmin", min_t},
                 {"negative_from", neg_lo ? json(*neg_lo) : json(nullptr)},
                 {"negative_to", neg_hi ? json(*neg_hi) : json(nullptr)}};
    return r;
}

Reproduction reproduce_system(ReproTarget target, const char* signature,
                              const std::string& copula_spec, const Grid& grid,
                              const std::optional<std::string>& diagonal) {
    const auto sig = MinimalSignature::parse(signature);
    const auto copula = parse_copula(copula_spec, grid);
    const auto system = system_distortion(sig, copula, grid);
    const auto& h = system.h;

    Reproduction r{target, {}, system_report(sig, copula, grid)};
    r.tables.push_back(sampled("h_T", "system distortion h_T(p)", grid, "p", h));
    r.tables.push_back(
        sampled("h_T_ratio", "h_T(p)/p", grid, "p", [&](double p) { return h(p) / p; }));
    if (target == ReproTarget::ex_qmit) {
        const auto hd = dual(h);
        r.tables.push_back(sampled("dual_ratio", "h*(p)/p with h*(p) = 1 - h_T(1-p)", grid, "p",
                                   [&](double p) { return hd(p) / p; }));
    }
    if (diagonal) {
        const auto d = Expr::parse(*diagonal, "p");
        r.tables.push_back(sampled("diagonal", "diagonal d(p)", grid, "p",
                                   [&](double p) { return d.eval(p); }));
    }
    return r;
}

}  // namespace

std::string to_string(ReproTarget t) {
    for (const auto& [k, name] : kNames)
        if (k == t) return name;
    return "unknown";
}

ReproTarget parse_repro_target(std::string_view name) {
    for (const auto& [k, n] : kNames)
        if (name == n) return k;
    throw std::invalid_argument("unknown reproduction target '" + std::string(name) + "'");
}

const std::array<ReproTarget, 7>& all_repro_targets() {
    static const std::array<ReproTarget, 7> all = [] {
        std::array<ReproTarget, 7> a{};
        for (std::size_t i = 0; i < kNames.size(); ++i) a[i] = kNames[i].first;
        return a;
    }();
    return all;
}

std::vector<double> qmit_t_grid() {
    std::vector<double> t;
    for (int k = 1; k <= 400; ++k) t.push_back(k / 200.0);
    return t;
}

Reproduction reproduce(ReproTarget target, const Grid& grid) {
    using namespace fixtures;
    switch (target) {
        case ReproTarget::ce02: return reproduce_ce02(grid);
        case ReproTarget::ce01: return reproduce_ce01();
        case ReproTarget::ex_durante_1:
            return reproduce_system(target, kDuranteSig1, durante_copula_spec(4), grid, {});
        case ReproTarget::ex_durante_2:
            return reproduce_system(target, kDuranteSig2, durante_copula_spec(4), grid, {});
        case ReproTarget::ex_diag_5comp:
            return reproduce_system(target, kDiagSig5, diagonal_copula_spec(kDiag5, 5), grid,
                                    kDiag5);
        case ReproTarget::ex_3of4:
            return reproduce_system(target, kSig3of4, diagonal_copula_spec(kDiag3of4, 4), grid,
                                    kDiag3of4);
        case ReproTarget::ex_qmit:
            return reproduce_system(target, kQmitSig, diagonal_copula_spec(kQmitDiag, 4), grid,
                                    kQmitDiag);
    }
    throw std::invalid_argument("unknown reproduction target");
}

}  // namespace storder
