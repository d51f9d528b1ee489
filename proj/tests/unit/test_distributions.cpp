#include <cmath>
#include <numbers>

#include "doctest.h"
#include "storder/repro.hpp"
#include "storder/specs.hpp"

using namespace storder;

TEST_CASE("build from each spec form") {
    const auto e1 = exponential(1.0);
    CHECK(e1.quantile(0.5) == doctest::Approx(std::log(2.0)).epsilon(1e-14));

    const auto x = parse_distribution(fixtures::kDmrlX);
    CHECK(x.quantile(1.0) == doctest::Approx(1.625).epsilon(1e-15));

    // ψ(1) = e - 1, so q(1 - exp(-(e - 1))) = 1.
    const auto h = parse_distribution(std::string("hazard:") + fixtures::kHazardPsi);
    const double p = 1.0 - std::exp(-(std::numbers::e - 1.0));
    CHECK(h.quantile(p) == doctest::Approx(1.0).epsilon(1e-10));

    CHECK_THROWS(parse_distribution("q:1-p"));
    CHECK_THROWS(parse_distribution("exp:-1"));
    CHECK_THROWS(parse_distribution("weibull:2"));
}

TEST_CASE("cdf") {
    const auto e1 = exponential(1.0);
    CHECK(e1.cdf(std::log(2.0)) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(e1.cdf(-1.0) == 0.0);
    const auto y = parse_distribution(fixtures::kDmrlY);
    CHECK(y.cdf(std::log(15.0 / 8.0)) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(y.cdf(0.1) == 0.0);
    CHECK(y.support_low() == doctest::Approx(std::log(15.0 / 8.0)));
}

TEST_CASE("cdf inverts the quantile on the grid") {
    const char* specs[] = {"exp:1", "exp:3", "q:17/8*p-1/2*p^2", "q:ln(15/8+p)", "q:p",
                           "hazard:x^2", "distort(exp:1, h=power:5)"};
    const auto grid = Grid::uniform();
    for (const char* s : specs) {
        const auto d = parse_distribution(s, grid);
        double worst = 0.0;
        for (double p : grid.points()) worst = std::max(worst, std::abs(d.cdf(d.quantile(p)) - p));
        CHECK_MESSAGE(worst <= 1e-6, s);
    }
    const auto psi = parse_distribution(std::string("hazard:") + fixtures::kHazardPsi, grid);
    double worst = 0.0;
    for (double p : grid.points()) worst = std::max(worst, std::abs(psi.cdf(psi.quantile(p)) - p));
    CHECK(worst <= 1e-6);
}

TEST_CASE("density_at_quantile") {
    CHECK(exponential(1.0).density_at_quantile(0.5) == doctest::Approx(0.5).epsilon(1e-14));
    const auto x = parse_distribution(fixtures::kDmrlX);
    const auto y = parse_distribution(fixtures::kDmrlY);
    CHECK(x.density_at_quantile(0.125) == doctest::Approx(0.5).epsilon(1e-14));
    for (double p : {0.1, 0.4, 0.9}) {
        const double ratio = x.density_at_quantile(p) / y.density_at_quantile(p);
        CHECK(ratio == doctest::Approx(1.0 / ((17.0 / 8.0 - p) * (15.0 / 8.0 + p))).epsilon(1e-13));
    }
}

TEST_CASE("mean") {
    CHECK(exponential(2.0).mean() == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(parse_distribution("q:p").mean() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(parse_distribution(fixtures::kDmrlX).mean() ==
          doctest::Approx(17.0 / 16.0 - 1.0 / 6.0).epsilon(1e-12));
    CHECK(parse_distribution("q:ln(1-p)^2").mean() == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("distort") {
    const auto grid = Grid::uniform();
    const auto e1 = exponential(1.0);
    const auto same = distort(e1, Distortion::identity());
    for (double p : grid.points()) CHECK(std::abs(same.quantile(p) - e1.quantile(p)) <= 1e-12);

    // h(p) = p^k turns exponential(1) into exponential(k).
    const auto e5 = distort(e1, Distortion::power(5.0));
    for (double x : {0.1, 0.5, 1.5}) CHECK(e5.survival(x) == doctest::Approx(std::exp(-5.0 * x)));

    const auto x = parse_distribution(fixtures::kDmrlX);
    const auto xh = distort(x, Distortion::power(5.0));
    for (double p : grid.points()) {
        const double u = 1.0 - std::pow(1.0 - p, 0.2);
        CHECK(xh.quantile(p) == doctest::Approx(17.0 / 8.0 * u - 0.5 * u * u).epsilon(1e-12));
    }
}

TEST_CASE("closed-form densities of the distorted dmrl pair") {
    const auto h = Distortion::power(5.0);
    const auto xh = distort(parse_distribution(fixtures::kDmrlX), h);
    const auto yh = distort(parse_distribution(fixtures::kDmrlY), h);
    for (double p : Grid::uniform().points()) {
        const double r = std::pow(1.0 - p, 0.2);
        CHECK(std::abs(xh.density_at_quantile(p) - 5.0 * std::pow(1.0 - p, 0.8) / (9.0 / 8.0 + r)) <=
              1e-6);
        CHECK(std::abs(yh.density_at_quantile(p) - 5.0 * std::pow(1.0 - p, 0.8) * (23.0 / 8.0 - r)) <=
              1e-6);
    }
}

TEST_CASE("distortions compose on the survival scale") {
    const auto grid = Grid::uniform();
    const auto h1 = Distortion::power(2.0);
    const auto h2 = parse_distortion("1-(1-p)^3", grid);
    const auto x = parse_distribution("q:ln(15/8+p)", grid);
    const auto twice = distort(distort(x, h1), h2);
    for (double v : {0.7, 0.9, 1.2}) {
        CHECK(std::abs(twice.survival(v) - h2(h1(x.survival(v)))) <= 1e-9);
    }
}

TEST_CASE("upper tail keeps precision") {
    const auto e = exponential(2.0);
    CHECK(e.upper_quantile(1e-200) == doctest::Approx(100.0 * std::log(10.0)).epsilon(1e-14));
    const auto x = parse_distribution("q:(-ln(1-p))^1.5");
    CHECK(x.upper_quantile(1e-100) == doctest::Approx(std::pow(100.0 * std::log(10.0), 1.5)).epsilon(1e-13));
    CHECK(x.upper_quantile_derivative(1e-100) ==
          doctest::Approx(1.5 * std::sqrt(100.0 * std::log(10.0)) * 1e100).epsilon(1e-12));
    const auto hz = parse_distribution("hazard:x^2");
    CHECK(hz.upper_quantile(1e-100) == doctest::Approx(std::sqrt(100.0 * std::log(10.0))).epsilon(1e-10));

    // Distorted: survival h(exp(-x)) with h = 0.2 p + 0.8 (1 - (1-p)^3).
    const auto h = parse_distortion("0.2*p + 0.8*(1-(1-p)^3)");
    const auto xh = distort(exponential(1.0), h);
    for (double p : {0.9, 1.0 - 1e-9, 1.0 - 1e-14}) {
        const double v = xh.quantile(p);
        CHECK(h(std::exp(-v)) == doctest::Approx(1.0 - p).epsilon(1e-9));
        CHECK(xh.density_at_quantile(p) == doctest::Approx(h.derivative(std::exp(-v)) * std::exp(-v)).epsilon(1e-9));
    }
}
