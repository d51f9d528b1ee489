#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "storder/numerics.hpp"

using namespace storder;

TEST_CASE("integrate: polynomial and quantile-space integrands") {
    CHECK(integrate([](double t) { return t; }, 0.0, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(integrate([](double t) { return (1.0 - t) / (1.0 - t); }, 0.0, 0.3) ==
          doctest::Approx(0.3).epsilon(1e-14));
    // 17/8 - 25/16 + 1/3 = 43/48, the mean of q(p) = 17/8 p - p^2/2.
    CHECK(integrate([](double t) { return (17.0 / 8.0 - t) * (1.0 - t); }, 0.0, 1.0) ==
          doctest::Approx(43.0 / 48.0).epsilon(1e-13));
    CHECK(integrate([](double) { return 1.0; }, 0.4, 0.4) == 0.0);
    CHECK_THROWS_AS(integrate([](double t) { return t; }, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("integrate: linearity on random polynomials") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        const double f0 = u(rng), f1 = u(rng), f2 = u(rng), g0 = u(rng), g1 = u(rng), a = u(rng),
                     b = u(rng);
        auto f = [&](double x) { return f0 + f1 * x + f2 * x * x; };
        auto g = [&](double x) { return g0 + g1 * x * x * x; };
        const double lhs = integrate([&](double x) { return a * f(x) + b * g(x); }, 0.0, 1.0);
        const double rhs = a * integrate(f, 0.0, 1.0) + b * integrate(g, 0.0, 1.0);
        CHECK(std::abs(lhs - rhs) <= 1e-9);
    }
}

TEST_CASE("integrate_singular: endpoint singularities") {
    const double v = integrate_singular([](double t) { return 1.0 / std::sqrt(t); }, 0.0, 1.0,
                                        {1e-14, 1e-12});
    CHECK(v == doctest::Approx(2.0).epsilon(1e-10));
    const double w = integrate_singular([](double t) { return -std::log(1.0 - t); }, 0.0, 1.0,
                                        {1e-14, 1e-12});
    CHECK(w == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("monotone_inverse") {
    auto id = [](double x) { return x; };
    CHECK(monotone_inverse(id, 0.7, 0.0, 1.0) == doctest::Approx(0.7).epsilon(1e-14));
    auto p5 = [](double x) { return std::pow(x, 5); };
    CHECK(monotone_inverse(p5, 0.5, 0.0, 1.0) == doctest::Approx(std::pow(0.5, 0.2)).epsilon(1e-12));
    auto cdf = [](double x) { return 1.0 - std::exp(-x); };
    CHECK(monotone_inverse(cdf, 0.5, 0.0, 50.0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK_THROWS_AS(monotone_inverse(id, 1.5, 0.0, 1.0), RangeError);

    auto dp5 = [](double x) { return 5.0 * std::pow(x, 4); };
    for (double y : {1e-12, 0.01, 0.3, 0.77, 0.999999}) {
        CHECK(std::abs(p5(monotone_inverse(p5, y, 0.0, 1.0)) - y) <= 1e-12);
        CHECK(std::abs(p5(monotone_inverse(p5, dp5, y, 0.0, 1.0)) - y) <= 1e-12);
    }
}

TEST_CASE("derivative") {
    CHECK(derivative([](double p) { return p * p; }, 0.5) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(derivative([](double p) { return -std::log(1.0 - p); }, 0.5) ==
          doctest::Approx(2.0).epsilon(1e-9));
    // One-sided stencil at the edge of the domain.
    CHECK(derivative([](double p) { return p * p; }, 1.0, 1e-6, 0.0, 1.0) ==
          doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("monotone_scan") {
    const std::vector<double> inc{1, 1, 2, 3}, dec{3, 2, 2, 1}, flat{2, 2, 2}, bump{1, 3, 2, 4};
    CHECK(monotone_scan(inc).kind == Monotonicity::increasing);
    CHECK(monotone_scan(dec).kind == Monotonicity::decreasing);
    CHECK(monotone_scan(flat).kind == Monotonicity::constant);
    const auto m = monotone_scan(bump);
    CHECK(m.kind == Monotonicity::neither);
    REQUIRE(m.witness_index);
    CHECK(*m.witness_index == 1);

    std::vector<double> rev(inc.rbegin(), inc.rend());
    CHECK(monotone_scan(rev).kind == Monotonicity::decreasing);

    // s(p) = 1 / ((17/8 - p)(15/8 + p)) turns at p = 1/8.
    const auto grid = Grid::uniform();
    std::vector<double> s;
    for (double p : grid.points()) s.push_back(1.0 / ((17.0 / 8.0 - p) * (15.0 / 8.0 + p)));
    const auto r = monotone_scan(s);
    CHECK(r.kind == Monotonicity::neither);
    REQUIRE(r.witness_index);
    CHECK(std::abs(grid[*r.witness_index] - 0.125) < 0.003);
}

TEST_CASE("sign_scan") {
    const std::vector<double> pos{0, 0.1, 0.2}, neg{-0.1, 0, -0.2}, mixed{0.1, -0.3, 0.2};
    CHECK(sign_scan(pos).kind == SignClass::nonnegative);
    CHECK(sign_scan(neg).kind == SignClass::nonpositive);
    const auto m = sign_scan(mixed);
    CHECK(m.kind == SignClass::mixed);
    REQUIRE(m.witness_index);
    CHECK(*m.witness_index == 1);
    const std::vector<double> tiny{0.0, -1e-12, 0.3};
    CHECK(sign_scan(tiny).kind == SignClass::nonnegative);
}

TEST_CASE("Grid invariants") {
    const auto g = Grid::uniform();
    CHECK(g.size() == 512);
    CHECK(g[0] == doctest::Approx(1e-3));
    CHECK(g[511] == doctest::Approx(1.0 - 1e-3));
    CHECK_THROWS(Grid::uniform(8));
    CHECK_THROWS(Grid::from_points({0.5, 0.4, 0.6}));
    CHECK_THROWS(Tolerance{-1.0, 1e-3}.validate());
}
