#include <cmath>
#include <string>
#include <variant>

#include "doctest.h"
#include "storder/repro.hpp"
#include "storder/specs.hpp"
#include "storder/sweep.hpp"

using namespace storder;

TEST_CASE("distribution specs") {
    CHECK(std::holds_alternative<spec::Exponential>(parse_distribution_spec("exp:2").form));
    CHECK(std::get<spec::Exponential>(parse_distribution_spec("exp:2").form).rate == 2.0);
    CHECK(std::holds_alternative<spec::QuantileExpr>(parse_distribution_spec("q:p^2+p").form));
    CHECK(std::holds_alternative<spec::HazardExpr>(parse_distribution_spec("hazard:x^2").form));
    const auto d = parse_distribution_spec("distort(exp:1, h=power:5)");
    REQUIRE(std::holds_alternative<spec::Distorted>(d.form));
    CHECK(std::holds_alternative<spec::Exponential>(std::get<spec::Distorted>(d.form).base->form));
    const auto nested = parse_distribution("distort(distort(exp:1, h=power:2), h=power:3)");
    CHECK(nested.survival(0.4) == doctest::Approx(std::exp(-6.0 * 0.4)));

    CHECK_THROWS(parse_distribution_spec("gamma:2"));
    CHECK_THROWS(parse_distribution_spec("exp:"));
    CHECK_THROWS(parse_distribution_spec("distort(exp:1, power:5)"));
    CHECK_THROWS(parse_distribution_spec("q:p+"));
}

TEST_CASE("distortion and copula specs") {
    CHECK(parse_distortion("identity")(0.3) == doctest::Approx(0.3));
    CHECK(parse_distortion("power:2")(0.3) == doctest::Approx(0.09));
    CHECK(parse_distortion("dualpower:2")(0.3) == doctest::Approx(0.51));
    CHECK(parse_distortion("h:p^2")(0.3) == doctest::Approx(0.09));
    CHECK_THROWS(parse_distortion("power:-1"));

    CHECK(parse_copula("product:3").dimension() == 3);
    CHECK(parse_copula("comonotone:4").dimension() == 4);
    CHECK(parse_copula("durante:f=p^0.5,n=4").dimension() == 4);
    CHECK(parse_copula("diagonal:d=p^2,n=2").dimension() == 2);
    CHECK_THROWS(parse_copula("gumbel:2"));
    CHECK_THROWS(parse_copula("durante:f=p^0.5"));
    CHECK_THROWS(parse_copula("diagonal:d=p^2,n=two"));
}

TEST_CASE("number formatting and csv") {
    CHECK(format_number(0.1) == "0.10000000000000001");
    CHECK(format_number(1.0) == "1");
    CHECK(format_number(-2.5) == "-2.5");
    Table t{"t", "a comment", {"p", "value"}, {{0.5, 0.25}, {1.0, 1.0}}};
    CHECK(to_csv(t) == "# a comment\np,value\n0.5,0.25\n1,1\n");
    Table bare{"t", "", {"x"}, {{2.0}}};
    CHECK(to_csv(bare) == "x\n2\n");
}

TEST_CASE("verdict json") {
    const auto grid = Grid::uniform(64);
    const auto v = check_order(exponential(1.0), exponential(0.5), OrderKind::ttt, grid);
    const auto j = to_json(v, "demo");
    CHECK(j.at("scenario") == "demo");
    CHECK(j.at("holds") == true);
    CHECK(j.contains("grid"));
    CHECK_FALSE(j.contains("curve"));
    CHECK(to_json(v, "demo", true).contains("curve"));
    const auto table = curve_table(v, "demo");
    CHECK(table.rows.size() == grid.size());
    CHECK(table.columns.size() == 4);
}

TEST_CASE("distortion and system reports") {
    const auto r = distortion_report(parse_distortion("p^5"));
    CHECK(r.at("summary") == "starshaped");
    const auto d = distortion_report(parse_distortion("1-(1-p)^5"));
    CHECK(d.at("summary") == "antistarshaped");
    CHECK(distortion_report(Distortion::identity()).at("summary") == "both");

    const auto s = system_report(MinimalSignature::parse(fixtures::kDuranteSig1),
                                 parse_copula(fixtures::durante_copula_spec(4)));
    CHECK(s.at("summary") == "antistarshaped");
    CHECK(s.contains("signature"));
}

TEST_CASE("reproduction targets") {
    for (ReproTarget t : all_repro_targets()) CHECK(parse_repro_target(to_string(t)) == t);
    CHECK_THROWS(parse_repro_target("nope"));

    const auto a = reproduce(ReproTarget::ce02);
    const auto b = reproduce(ReproTarget::ce02);
    CHECK(a.summary.dump() == b.summary.dump());
    REQUIRE(a.tables.size() == b.tables.size());
    for (std::size_t i = 0; i < a.tables.size(); ++i) CHECK(to_csv(a.tables[i]) == to_csv(b.tables[i]));
    CHECK(a.summary.at("convex_transform_holds") == false);
    CHECK(a.summary.at("dmrl_holds") == true);
    CHECK(a.summary.at("dmrl_h_holds") == false);

    const auto q = reproduce(ReproTarget::ce01);
    CHECK(q.summary.at("qmit_holds") == true);
    CHECK(q.summary.at("qmit_h_holds") == false);
    CHECK(qmit_t_grid().size() == 400);
}

TEST_CASE("sweep config") {
    const auto def = SweepConfig::from_json(json::object());
    CHECK(def.trials == 200);
    CHECK(def.suites.size() == 6);
    const auto c = SweepConfig::from_json(json{{"seed", 7}, {"trials", 3}, {"suites", {"ttt", "c"}}});
    CHECK(c.seed == 7);
    CHECK(c.trials == 3);
    REQUIRE(c.suites.size() == 2);
    CHECK(c.suites[1] == SweepSuite::convex_transform);
    const auto back = SweepConfig::from_json(c.to_json());
    CHECK(back.to_json() == c.to_json());
    CHECK_THROWS_AS(SweepConfig::from_json(json{{"trials", -1}}), std::invalid_argument);
    CHECK_THROWS_AS(SweepConfig::from_json(json{{"suites", {"lr"}}}), std::invalid_argument);
}

TEST_CASE("sweep determinism and a short run") {
    for (SweepSuite s : all_sweep_suites()) {
        const auto a = generate_trials(s, 11, 5);
        const auto b = generate_trials(s, 11, 5);
        REQUIRE(a.size() == 5);
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].x == b[i].x);
            CHECK(a[i].y == b[i].y);
            CHECK(a[i].h == b[i].h);
        }
    }
    SweepConfig cfg;
    cfg.seed = 3;
    cfg.trials = 4;
    cfg.grid_count = 64;
    const auto summary = run_sweep(cfg);
    CHECK(summary.ok());
    CHECK(summary.suites.size() == 6);
    for (const auto& s : summary.suites) CHECK(s.passed == 4);
    CHECK(summary.to_json().dump() == run_sweep(cfg).to_json().dump());
}
