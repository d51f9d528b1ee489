#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "storder/repro.hpp"
#include "storder/specs.hpp"

using namespace storder;

TEST_CASE("ttt_transform") {
    const auto e1 = exponential(1.0);
    CHECK(ttt_transform(e1, 0.4) == doctest::Approx(0.4).epsilon(1e-12));
    const auto x = parse_distribution(fixtures::kDmrlX);
    CHECK(ttt_transform(x, 1.0) == doctest::Approx(43.0 / 48.0).epsilon(1e-12));
    CHECK(ttt_transform(x, 1.0) == doctest::Approx(x.mean()).epsilon(1e-12));
    // Shifted support: the transform starts at q(0).
    const auto y = parse_distribution(fixtures::kDmrlY);
    CHECK(ttt_transform(y, 0.0) == doctest::Approx(std::log(15.0 / 8.0)).epsilon(1e-14));
}

TEST_CASE("excess_wealth") {
    CHECK(excess_wealth(exponential(1.0), 0.25) == doctest::Approx(0.75).epsilon(1e-12));
    const auto u = parse_distribution("q:p");
    CHECK(excess_wealth(u, 0.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(excess_wealth(u, 0.6) == doctest::Approx(0.08).epsilon(1e-14));
    CHECK(excess_wealth(u, 1.0) == 0.0);
}

TEST_CASE("mit_transform") {
    const auto u = parse_distribution("q:p");
    CHECK(mit_transform(u, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(mit_transform(exponential(1.0), 0.5) ==
          doctest::Approx(-0.5 - std::log(0.5)).epsilon(1e-12));
    CHECK(mit_transform(u, 0.0) == 0.0);
}

TEST_CASE("ttt + ew = mean on the grid") {
    const auto grid = Grid::uniform();
    for (const char* s : {"exp:1", "q:17/8*p-1/2*p^2", "q:ln(15/8+p)", "hazard:x^2",
                          "distort(exp:2, h=power:3)"}) {
        const auto x = parse_distribution(s, grid);
        const auto t = ttt_curve(x, grid);
        const auto w = excess_wealth_curve(x, grid);
        for (std::size_t i = 0; i < grid.size(); i += 17)
            CHECK_MESSAGE(std::abs(t[i] + w[i] - x.mean()) <= 2e-8, s);
    }
}

TEST_CASE("reflexivity") {
    const auto grid = Grid::uniform(128);
    for (const char* s : {"exp:1", "q:17/8*p-1/2*p^2", "hazard:x^2"}) {
        const auto x = parse_distribution(s, grid);
        for (OrderKind k : all_orders()) CHECK_MESSAGE(check_order(x, x, k, grid).holds, s);
        CHECK(dmrl_integral(x, x, 0.3) == doctest::Approx(0.0));
        CHECK(qmit_xspace_integral(x, x, 0.7) == doctest::Approx(0.0));
    }
}

TEST_CASE("dmrl counterexample pair") {
    const auto grid = Grid::uniform();
    const auto x = parse_distribution(fixtures::kDmrlX, grid);
    const auto y = parse_distribution(fixtures::kDmrlY, grid);
    const auto c = check_order(x, y, OrderKind::convex_transform, grid);
    CHECK_FALSE(c.holds);
    REQUIRE(c.turning_point);
    CHECK(std::abs(*c.turning_point - 0.125) <= 0.002);
    const auto d = check_order(x, y, OrderKind::dmrl, grid);
    CHECK(d.holds);
    REQUIRE(d.integral_agrees);
    CHECK(*d.integral_agrees);
    const auto i = dmrl_integral_curve(x, y, grid);
    CHECK(sign_scan(i).kind == SignClass::nonnegative);

    const auto h = Distortion::power(5.0);
    const auto xh = distort(x, h), yh = distort(y, h);
    const auto dh = check_order(xh, yh, OrderKind::dmrl, grid);
    CHECK_FALSE(dh.holds);
    CHECK(dmrl_integral(xh, yh, 0.01) < 0.0);
    const auto ih = dmrl_integral_curve(xh, yh, grid);
    const auto scan = sign_scan(ih);
    CHECK(scan.kind == SignClass::mixed);
    for (std::size_t k = 0; k < grid.size(); ++k)
        if (ih[k] < -1e-9) CHECK(grid[k] < 0.02632 + 0.002);
}

TEST_CASE("qmit counterexample pair") {
    const auto grid = Grid::uniform();
    const auto x = parse_distribution(std::string("hazard:") + fixtures::kHazardPsi, grid);
    const auto y = parse_distribution(fixtures::kQmitY, grid);
    CHECK(check_order(x, y, OrderKind::qmit, grid).holds);
    const auto h = Distortion::dual_power(5.0);
    const auto xh = distort(x, h), yh = distort(y, h);
    CHECK(qmit_xspace_integral(xh, yh, 1.3) < 0.0);
    CHECK(qmit_xspace_integral(xh, yh, 0.5) > 0.0);
    CHECK_FALSE(check_order(xh, yh, OrderKind::qmit, grid).holds);
}

TEST_CASE("dmrl verdict agrees with the integral criterion") {
    const auto grid = Grid::uniform(256);
    const std::vector<std::pair<std::string, std::string>> pairs = {
        {"exp:1", "exp:0.5"},
        {fixtures::kDmrlX, fixtures::kDmrlY},
        {"q:p", "q:p^2+p"},
        {"q:p^2+p", "q:p"},
        {"exp:1", "q:p"},
    };
    for (const auto& [xs, ys] : pairs) {
        const auto x = parse_distribution(xs, grid), y = parse_distribution(ys, grid);
        const auto v = check_order(x, y, OrderKind::dmrl, grid);
        const auto i = dmrl_integral_curve(x, y, grid);
        const bool nonneg = sign_scan(i, {1e-8, 1e-12}).kind == SignClass::nonnegative;
        CHECK_MESSAGE(v.holds == nonneg, std::string(xs + " vs " + ys));
    }
}

TEST_CASE("order implications") {
    const auto grid = Grid::uniform(256);
    const auto r = order_implication_check(exponential(1.0), exponential(0.5), grid);
    CHECK(r.verdicts.at(OrderKind::convex_transform).holds);
    CHECK(r.verdicts.at(OrderKind::dmrl).holds);
    CHECK(r.verdicts.at(OrderKind::qmit).holds);
    CHECK(r.verdicts.at(OrderKind::star).holds);
    CHECK(r.alarms.empty());

    const auto x = parse_distribution(fixtures::kDmrlX, grid);
    const auto y = parse_distribution(fixtures::kDmrlY, grid);
    const auto ce = order_implication_check(x, y, grid);
    CHECK_FALSE(ce.verdicts.at(OrderKind::convex_transform).holds);
    CHECK(ce.verdicts.at(OrderKind::dmrl).holds);
    CHECK(ce.alarms.empty());
}

TEST_CASE("c and star verdicts are invariant under a common distortion") {
    const auto grid = Grid::uniform(128);
    const auto x = parse_distribution("exp:1", grid);
    const std::vector<std::string> ys = {"q:ln(1-p)^2", "q:p", fixtures::kDmrlY};
    for (const char* hs : {"power:3", "dualpower:2", "3/4*p + 1/4*(2*p^2-p^3)"}) {
        const auto h = parse_distortion(hs, grid);
        std::vector<double> matched;
        for (double p : grid.points()) matched.push_back(dual(h)(p));
        const auto mgrid = Grid::from_points(matched);
        for (const auto& ys_ : ys) {
            const auto y = parse_distribution(ys_, grid);
            for (OrderKind k : {OrderKind::convex_transform, OrderKind::star}) {
                const bool base = check_order(x, y, k, grid).holds;
                const bool dist = check_order(distort(x, h), distort(y, h), k, mgrid).holds;
                CHECK_MESSAGE(base == dist, std::string(ys_ + " " + hs));
            }
        }
    }
}

TEST_CASE("ttt scale covariance") {
    const auto grid = Grid::uniform(256);
    const auto x = exponential(2.0), y = exponential(1.0);
    REQUIRE(check_order(x, y, OrderKind::ttt, grid).holds);
    const auto y3 = parse_distribution("q:-3*ln(1-p)", grid);
    CHECK(check_order(x, y3, OrderKind::ttt, grid).holds);
    CHECK(check_order(x, y3, OrderKind::ew, grid).holds);
    CHECK_FALSE(check_order(y3, x, OrderKind::ttt, grid).holds);
}

TEST_CASE("dmrl pair scan") {
    const auto x = parse_distribution(fixtures::kDmrlX);
    const auto y = parse_distribution(fixtures::kDmrlY);
    CHECK(dmrl_pair_scan(x, y).nonnegative);
    const auto h = Distortion::power(5.0);
    CHECK_FALSE(dmrl_pair_scan(distort(x, h), distort(y, h), 48).nonnegative);
}

TEST_CASE("parse_order_kind") {
    CHECK(parse_order_kind("c") == OrderKind::convex_transform);
    CHECK(parse_order_kind("convex") == OrderKind::convex_transform);
    CHECK(parse_order_kind("ew") == OrderKind::ew);
    CHECK_THROWS(parse_order_kind("lr"));
}
