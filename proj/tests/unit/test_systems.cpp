#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "storder/repro.hpp"
#include "storder/specs.hpp"

using namespace storder;

namespace {

DuranteGenerator generator(const char* f, int n) { return validate_generator(Expr::parse(f, "p"), n); }

bool exact_is(const Number& n, Rational r) { return n.exact && *n.exact == r; }

}  // namespace

TEST_CASE("signature parsing") {
    const auto s = MinimalSignature::parse("2,0,-2,1");
    CHECK(s.n() == 4);
    CHECK(s.exact());
    CHECK(s[1] == 2.0);
    CHECK(s[4] == 1.0);
    CHECK(MinimalSignature::parse("1/2, 1/2").exact());
    CHECK_THROWS(MinimalSignature::parse("1,1"));
    CHECK_THROWS(MinimalSignature::parse("a,b"));
    for (const char* sig : {"2,0,-2,1", "0,1,1,-1", "0,0,0,3,-2", "0,6,-8,3", "0,0,2,-1"}) {
        const auto m = MinimalSignature::parse(sig);
        Number sum(Rational(0));
        for (int i = 1; i <= m.n(); ++i) sum = sum + m.coefficient(i);
        CHECK(exact_is(sum, Rational(1)));
    }
}

TEST_CASE("system_distortion") {
    const auto grid = Grid::uniform();
    const auto sig = MinimalSignature::parse("2,0,-2,1");
    const auto id = system_distortion(sig, durante_copula(generator("p", 4)), grid);
    CHECK(id.h(0.5) == doctest::Approx(0.8125).epsilon(1e-15));
    const auto sq = system_distortion(sig, parse_copula(fixtures::durante_copula_spec(4), grid), grid);
    for (double p : {0.1, 0.5, 0.9}) {
        const double f = std::sqrt(p);
        CHECK(sq.h(p) == doctest::Approx(2 * p - 2 * p * f * f + p * f * f * f).epsilon(1e-14));
    }
    // Series system: h_T(p) = C(p, ..., p).
    const auto series = system_distortion(MinimalSignature::parse("0,0,1"), product_copula(3), grid);
    CHECK(series.h(0.4) == doctest::Approx(0.064).epsilon(1e-15));
}

TEST_CASE("durante_system_distortion") {
    const auto grid = Grid::uniform();
    const auto sig = MinimalSignature::parse("0,1,1,-1");
    const auto s = durante_system_distortion(sig, generator("p", 4), grid);
    CHECK(s.h(0.5) == doctest::Approx(0.3125).epsilon(1e-15));
    const auto g = generator("p^0.5", 4);
    const auto sq = durante_system_distortion(sig, g, grid);
    for (double p : {0.2, 0.7}) {
        const double f = std::sqrt(p);
        CHECK(sq.h(p) == doctest::Approx(p * f + p * f * f - p * f * f * f).epsilon(1e-14));
    }
    const auto one = durante_system_distortion(MinimalSignature::parse("1,0,0"), generator("p", 3), grid);
    CHECK(one.h(0.3) == doctest::Approx(0.3));

    // Closed form agrees with generic evaluation of the copula.
    for (const char* sg : {"2,0,-2,1", "0,1,1,-1"})
        for (const char* f : {"p", "p^0.5", "0.3*p+0.7"}) {
            const auto m = MinimalSignature::parse(sg);
            const auto gen = generator(f, 4);
            const auto a = durante_system_distortion(m, gen, grid);
            const auto b = system_distortion(m, durante_copula(gen), grid);
            for (double p : grid.points()) CHECK(std::abs(a.h(p) - b.h(p)) <= 1e-12);
        }
}

TEST_CASE("durante_shape_condition") {
    const auto grid = Grid::uniform();
    for (const char* f : {"p", "p^0.5", "p^0.2"}) {
        const auto g = generator(f, 4);
        CHECK(durante_shape_condition(MinimalSignature::parse("2,0,-2,1"), g, grid).antistarshaped());
        CHECK(durante_shape_condition(MinimalSignature::parse("0,1,1,-1"), g, grid).starshaped());
        CHECK(durante_shape_condition(MinimalSignature::parse("0,0,0,1"), g, grid).starshaped());
    }
}

TEST_CASE("classify_3component") {
    const auto par = classify_3component(MinimalSignature::parse("3,-3,1"));
    CHECK(par.verdict == ShapeVerdict::antistarshaped_any_f);
    CHECK(exact_is(par.parameters.at("omega"), Rational(3, 2)));
    const auto ser = classify_3component(MinimalSignature::parse("0,0,1"));
    CHECK(ser.verdict == ShapeVerdict::starshaped_any_f);
    const auto mid = classify_3component(MinimalSignature::parse("0,3,-2"));
    CHECK(mid.verdict == ShapeVerdict::antistarshaped_if);
    REQUIRE(mid.threshold);
    CHECK(exact_is(*mid.threshold, Rational(3, 4)));
}

TEST_CASE("classify_4component") {
    const auto a = classify_4component(MinimalSignature::parse("2,0,-2,1"));
    CHECK(a.verdict == ShapeVerdict::antistarshaped_any_f);
    CHECK(exact_is(a.parameters.at("delta"), Rational(4)));
    CHECK(exact_is(a.parameters.at("x1"), Rational(0)));
    CHECK(exact_is(a.parameters.at("x2"), Rational(4, 3)));

    const auto b = classify_4component(MinimalSignature::parse("0,1,1,-1"));
    CHECK(b.verdict == ShapeVerdict::starshaped_any_f);
    CHECK(exact_is(b.parameters.at("delta"), Rational(4)));
    CHECK(exact_is(b.parameters.at("x1"), Rational(-1, 3)));
    CHECK(exact_is(b.parameters.at("x2"), Rational(1)));

    const auto c = classify_4component(MinimalSignature::parse("0,6,-8,3"));
    CHECK(exact_is(c.parameters.at("delta"), Rational(10)));
    CHECK(c.verdict == ShapeVerdict::antistarshaped_if);
    REQUIRE(c.threshold);
    CHECK(c.threshold->value == doctest::Approx((16.0 - std::sqrt(40.0)) / 18.0).epsilon(1e-14));
    CHECK(c.parameters.at("x2").value == doctest::Approx((16.0 + std::sqrt(40.0)) / 18.0));
}

TEST_CASE("closed-form verdicts agree with the grid condition") {
    const auto grid = Grid::uniform();
    const char* sigs4[] = {"2,0,-2,1", "0,1,1,-1", "0,0,0,1", "4,-6,4,-1", "1,0,0,0"};
    const char* sigs3[] = {"3,-3,1", "0,0,1", "0,2,-1", "1,0,0"};
    const char* gens[] = {"p", "p^0.5", "p^0.2", "0.4*p+0.6"};
    auto agree = [&](const ShapeClassification& c, const MinimalSignature& m, int n) {
        for (const char* f : gens) {
            const auto grid_verdict = durante_shape_condition(m, generator(f, n), grid);
            if (c.verdict == ShapeVerdict::starshaped_any_f) CHECK(grid_verdict.starshaped());
            if (c.verdict == ShapeVerdict::antistarshaped_any_f) CHECK(grid_verdict.antistarshaped());
        }
    };
    for (const char* s : sigs4) agree(classify_4component(MinimalSignature::parse(s)), MinimalSignature::parse(s), 4);
    for (const char* s : sigs3) agree(classify_3component(MinimalSignature::parse(s)), MinimalSignature::parse(s), 3);
}

TEST_CASE("diag_system_params and classify_diag") {
    struct Case {
        const char* sig;
        Rational a, b;
    };
    for (const auto& c : {Case{"0,0,0,3,-2", Rational(3, 4), Rational(1, 4)},
                          Case{"0,6,-8,3", Rational(4, 3), Rational(-1, 3)},
                          Case{"0,0,2,-1", Rational(2, 3), Rational(1, 3)}}) {
        const auto p = diag_system_params(MinimalSignature::parse(c.sig));
        CHECK(exact_is(p.alpha, c.a));
        CHECK(exact_is(p.beta, c.b));
        CHECK(exact_is(p.alpha + p.beta, Rational(1)));
    }

    const auto grid = Grid::uniform();
    const auto d5 = validate_diagonal(Expr::parse(fixtures::kDiag5, "p"), 5, grid);
    const auto r5 = classify_diag(MinimalSignature::parse(fixtures::kDiagSig5), d5, grid);
    CHECK(r5.starshaped());
    const auto d4 = validate_diagonal(Expr::parse(fixtures::kDiag3of4, "p"), 4, grid);
    const auto r4 = classify_diag(MinimalSignature::parse(fixtures::kSig3of4), d4, grid);
    CHECK(r4.antistarshaped());

    // beta = 0: h_T is the identity.
    const auto id = system_distortion(MinimalSignature::parse("1,0,0"), jaworski_copula(validate_diagonal(Expr::parse("p^2", "p"), 3, grid)), grid);
    for (double p : {0.2, 0.8}) CHECK(id.h(p) == doctest::Approx(p).epsilon(1e-14));

    // alpha p + beta d(p) agrees with the generic boundary sums.
    for (const auto& [sig, d, n] : {std::tuple{fixtures::kDiagSig5, fixtures::kDiag5, 5},
                                    std::tuple{fixtures::kSig3of4, fixtures::kDiag3of4, 4},
                                    std::tuple{fixtures::kQmitSig, fixtures::kQmitDiag, 4}}) {
        const auto m = MinimalSignature::parse(sig);
        const auto dd = validate_diagonal(Expr::parse(d, "p"), n, grid);
        const auto params = diag_system_params(m);
        const auto s = system_distortion(m, jaworski_copula(dd), grid);
        for (double p : grid.points())
            CHECK(std::abs(s.h(p) - (params.alpha.value * p + params.beta.value * dd.d(p))) <= 1e-12);
        // Direct grid classification matches the closed-form verdict.
        const auto c = classify_diag(m, dd, grid);
        const auto direct = classify(s.h, grid);
        if (c.verdict == ShapeVerdict::starshaped) CHECK(direct.starshaped);
        if (c.verdict == ShapeVerdict::antistarshaped) CHECK(direct.antistarshaped);
    }
}

TEST_CASE("parallel and series distortions") {
    const auto grid = Grid::uniform();
    const auto par = parallel_distortion(product_copula(3), grid);
    for (double p : {0.2, 0.7}) CHECK(par(p) == doctest::Approx(1.0 - std::pow(1.0 - p, 3)));
    const auto com = parallel_distortion(comonotone_copula(3), grid);
    CHECK(com(0.4) == doctest::Approx(0.4));
    const auto ca = parallel_distortion(cuadras_auge_copula(0.5), grid);
    CHECK(ca(0.5) == doctest::Approx(1.0 - std::pow(0.5, 1.5)).epsilon(1e-14));
    CHECK(ca(0.5) == doctest::Approx(0.64645).epsilon(1e-5));

    CHECK(series_distortion(product_copula(3), grid)(0.5) == doctest::Approx(0.125));
    CHECK(series_distortion(comonotone_copula(3), grid)(0.5) == doctest::Approx(0.5));
    const auto j = parse_copula(fixtures::diagonal_copula_spec(fixtures::kDiag5, 5), grid);
    CHECK(series_distortion(j, grid)(0.5) == doctest::Approx(0.375));
}

TEST_CASE("preservation_advice") {
    const auto grid = Grid::uniform();
    const auto p5 = parse_distortion("p^5", grid);
    CHECK(preservation_advice(OrderKind::ttt, p5, grid) == Advice::preserved);
    CHECK(preservation_advice(OrderKind::dmrl, p5, grid) == Advice::not_guaranteed);
    CHECK(preservation_advice(OrderKind::ew, p5, grid) == Advice::not_guaranteed);
    const auto qh = parse_distortion("2/3*p + 1/3*(" + std::string(fixtures::kQmitDiag) + ")", grid);
    CHECK(preservation_advice(OrderKind::qmit, qh, grid) == Advice::preserved);
    const auto d5 = parse_distortion("1-(1-p)^5", grid);
    CHECK(preservation_advice(OrderKind::ew, d5, grid) == Advice::preserved);
    CHECK(preservation_advice(OrderKind::dmrl, d5, grid) == Advice::preserved);
}

TEST_CASE("classify_system dispatch") {
    const auto grid = Grid::uniform();
    const auto a = classify_system(MinimalSignature::parse(fixtures::kDuranteSig1),
                                   parse_copula(fixtures::durante_copula_spec(4), grid), grid);
    CHECK(a.antistarshaped());
    const auto b = classify_system(MinimalSignature::parse("0,0,1"), product_copula(3), grid);
    CHECK(b.starshaped());
    CHECK_FALSE(b.note.empty());
}
