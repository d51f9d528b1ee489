#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "storder/repro.hpp"
#include "storder/specs.hpp"

using namespace storder;

TEST_CASE("validate") {
    const auto grid = Grid::uniform();
    CHECK(parse_distortion("p^5", grid).strictly_increasing());
    CHECK(parse_distortion("1-(1-p)^5", grid).strictly_increasing());
    CHECK_THROWS_AS(parse_distortion("p^2 - 0.1", grid), ValidationError);
    CHECK_THROWS_AS(parse_distortion("0.5*p", grid), ValidationError);
    CHECK_THROWS_AS(parse_distortion("4*p*(1-p) + p^3", grid), ValidationError);
    // Flat at zero: valid, not strict.
    const auto flat = parse_distortion("max(0, 2*p-1)", grid);
    CHECK_FALSE(flat.strictly_increasing());
}

TEST_CASE("dual") {
    const auto grid = Grid::uniform();
    const auto d5 = dual(Distortion::power(5.0));
    for (double p : grid.points()) CHECK(std::abs(d5(p) - (1.0 - std::pow(1.0 - p, 5))) <= 1e-15);
    const auto di = dual(Distortion::identity());
    for (double p : grid.points()) CHECK(std::abs(di(p) - p) <= 1e-15);

    const auto d = Expr::parse(fixtures::kQmitDiag, "p");
    const auto h = parse_distortion("2/3*p + 1/3*(" + std::string(fixtures::kQmitDiag) + ")", grid);
    const auto hs = dual(h);
    for (double p : grid.points()) {
        const double expect = 1.0 - 2.0 / 3.0 * (1.0 - p) - d.eval(1.0 - p) / 3.0;
        CHECK(std::abs(hs(p) - expect) <= 1e-14);
    }

    // Involution.
    for (const char* s : {"p^5", "1-(1-p)^5", "3/4*p + 1/4*(2*p^2-p^3)", "ln(1+3*p)/ln(4)"}) {
        const auto g = parse_distortion(s, grid);
        const auto gg = dual(dual(g));
        for (double p : grid.points()) CHECK(std::abs(gg(p) - g(p)) <= 1e-12);
    }
}

TEST_CASE("inverse and dual inverse") {
    CHECK(Distortion::power(5.0).inverse(0.5) == doctest::Approx(0.870550563296124).epsilon(1e-14));
    CHECK(Distortion::identity().inverse(0.3) == doctest::Approx(0.3));
    CHECK(Distortion::dual_power(5.0).inverse(0.5) ==
          doctest::Approx(1.0 - std::pow(0.5, 0.2)).epsilon(1e-14));
    CHECK(Distortion::dual_power(5.0).inverse(0.5) == doctest::Approx(0.129449436703876));

    const auto grid = Grid::uniform();
    for (const char* s : {"p^5", "1-(1-p)^5", "3/4*p + 1/4*(2*p^2-p^3)", "p^0.3", "(exp(p)-1)/(e-1)"}) {
        const auto h = parse_distortion(s, grid);
        for (double p : grid.points()) {
            CHECK(std::abs(h(h.inverse(h(p))) - h(p)) <= 1e-12);
            // Where h is nearly flat, h(p) itself no longer determines p in
            // double precision (1-(1-p)^5 has h' = 5e-12 at p = 0.999).
            if (h.derivative(p) > 1e-9) CHECK(std::abs(h.inverse(h(p)) - p) <= 1e-6);
            const double u = h.dual_inverse(p);
            CHECK(std::abs(1.0 - h(1.0 - u) - p) <= 1e-10);
        }
        // Tiny p: 1 - p rounds to 1, the inverse still resolves u.
        const double slope = h.derivative(1.0);
        const double u = h.dual_inverse(1e-18);
        CHECK(u > 0.0);
        if (slope > 0.0) CHECK(u == doctest::Approx(1e-18 / slope).epsilon(1e-6));
    }
}

TEST_CASE("classify") {
    const auto grid = Grid::uniform();
    const auto p5 = classify(parse_distortion("p^5", grid), grid);
    CHECK(p5.convex);
    CHECK(p5.starshaped);
    CHECK_FALSE(p5.antistarshaped);
    CHECK(p5.witnesses.count("antistarshaped"));

    const auto d5 = classify(parse_distortion("1-(1-p)^5", grid), grid);
    CHECK(d5.concave);
    CHECK(d5.antistarshaped);
    CHECK_FALSE(d5.starshaped);

    const auto diag = classify(parse_distortion("3/4*p + 1/4*(2*p^2-p^3)", grid), grid);
    CHECK(diag.starshaped);
    CHECK_FALSE(diag.convex);

    const auto id = classify(Distortion::identity(), grid);
    CHECK(id.convex);
    CHECK(id.concave);
    CHECK(id.starshaped);
    CHECK(id.antistarshaped);
}

TEST_CASE("classify: convex implies starshaped, concave implies antistarshaped") {
    const auto grid = Grid::uniform();
    const std::vector<std::string> catalog = {
        "identity", "power:5", "power:0.5", "dualpower:5", "dualpower:0.3", "p^2", "p^3", "p^0.2",
        "1-(1-p)^2", "3/4*p + 1/4*(2*p^2-p^3)", "4/3*p - 1/3*(1/4*p+3/4*(2*p^2-p^3))",
        "2/3*p + 1/3*(1-7/4*(1-p)+3/2*(1-p)^2-3/4*(1-p)^3)", "2*p - 2*p^2 + p^2.5",
        "p^1.5 + p^2 - p^2.5", "ln(1+3*p)/ln(4)", "(exp(2*p)-1)/(exp(2)-1)", "max(0, 2*p-1)",
        "min(1, 2*p)", "sqrt(p)", "p*p^0.3", "0.5*p + 0.5*p^4", "0.3*p + 0.7*(1-(1-p)^3)"};
    int checked = 0;
    for (const auto& s : catalog) {
        const auto r = classify(parse_distortion(s, grid), grid);
        if (r.convex) CHECK_MESSAGE(r.starshaped, s);
        if (r.concave) CHECK_MESSAGE(r.antistarshaped, s);
        ++checked;
    }
    CHECK(checked >= 20);
}

TEST_CASE("compose_on_survival") {
    const auto grid = Grid::uniform();
    const auto h = parse_distortion("1-(1-p)^5", grid);
    const auto c1 = compose_on_survival(Distortion::identity(), h);
    for (double p : grid.points()) CHECK(std::abs(c1(p) - h(p)) <= 1e-15);
    const auto c2 = compose_on_survival(Distortion::power(2.0), Distortion::power(3.0));
    for (double p : grid.points()) CHECK(std::abs(c2(p) - std::pow(p, 6)) <= 1e-15);
    const auto c3 = compose_on_survival(Distortion::power(5.0), h);
    CHECK(c3(0.5) == doctest::Approx(1.0 - std::pow(1.0 - 0.03125, 5)).epsilon(1e-14));
    CHECK(c3(0.5) == doctest::Approx(0.14670).epsilon(1e-4));
}
