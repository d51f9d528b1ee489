#include "storder/sweep.hpp"

#include <charconv>
#include <cmath>
#include <random>
#include <stdexcept>

#include "storder/repro.hpp"
#include "storder/specs.hpp"

namespace storder {

namespace {

constexpr std::array<std::pair<SweepSuite, const char*>, 6> kSuiteNames{{
    {SweepSuite::ttt, "ttt"},
    {SweepSuite::ew, "ew"},
    {SweepSuite::dmrl, "dmrl"},
    {SweepSuite::qmit, "qmit"},
    {SweepSuite::convex_transform, "convex_transform"},
    {SweepSuite::star, "star"},
}};

// Shortest text that reads back to the same double.
std::string num(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : rng_(seed) {}

    // Uniform on [lo, hi], rounded to three decimals so the textual form is exact.
    double uniform(double lo, double hi) {
        const double v = std::uniform_real_distribution<double>(lo, hi)(rng_);
        return std::clamp(std::round(v * 1000.0) / 1000.0, lo, hi);
    }
    std::size_t pick(std::size_t n) {
        return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_);
    }

private:
    std::mt19937_64 rng_;
};

// Base quantile functions with q(0) = 0, written in p. Bounded ones only
// when requested.
std::string base_quantile(Sampler& s, bool bounded) {
    if (bounded)
        return s.pick(2) == 0 ? num(s.uniform(0.5, 2.0)) + "*p"
                              : num(s.uniform(0.5, 2.0)) + "*p^" + num(s.uniform(0.5, 2.0));
    switch (s.pick(5)) {
        case 0: return "-ln(1-p)/" + num(s.uniform(0.5, 2.0));
        case 1: return num(s.uniform(0.5, 2.0)) + "*p";
        case 2: return num(s.uniform(0.5, 2.0)) + "*p^" + num(s.uniform(0.5, 2.0));
        case 3:
            return num(s.uniform(0.2, 1.0)) + "*p + " + num(s.uniform(0.2, 1.0)) + "*(-ln(1-p))";
        default:
            return "(-ln(1-p))^" + num(s.uniform(1.0, 2.0)) + "/" + num(s.uniform(0.5, 2.0));
    }
}

// Smallest q'(p) over grid points in [from, to).
double min_slope(const std::string& q, double from, double to) {
    const auto grid = Grid::uniform(128);
    const auto x = parse_distribution("q:" + q, grid);
    double m = INFINITY;
    for (double p : grid.points())
        if (p >= from && p < to) m = std::min(m, x.quantile_derivative(p));
    return std::isfinite(m) ? m : 0.0;
}

enum class PairKind {
    scale,        // Y = c X, c >= 1
    shift,        // Y = X + s
    dispersive,   // q_Y = q_X + b p^m
    ttt_only,     // q_Y = q_X + b (p - c p^2), c <= 3/2
    ew_only,      // q_Y = q_X + b (p^2 - c p), c <= 2/3
    convex,       // q_Y = s q_X^r, r >= 1
    quadratic,    // q_Y = s (q_X + b q_X^2)
    swapped,      // convex with the roles of X and Y exchanged
    dmrl_example, // dmrl-ordered pair that is not convex-transform ordered
    qmit_example, // qmit-ordered pair given by a cumulative hazard
};

const char* name(PairKind k) {
    switch (k) {
        case PairKind::scale: return "scale";
        case PairKind::shift: return "shift";
        case PairKind::dispersive: return "dispersive";
        case PairKind::ttt_only: return "ttt_additive";
        case PairKind::ew_only: return "ew_additive";
        case PairKind::convex: return "convex_transform";
        case PairKind::quadratic: return "quadratic_transform";
        case PairKind::swapped: return "swapped_convex_transform";
        case PairKind::dmrl_example: return "dmrl_example";
        case PairKind::qmit_example: return "qmit_example";
    }
    return "?";
}

std::pair<std::string, std::string> make_pair(PairKind kind, Sampler& s, bool bounded) {
    using namespace fixtures;
    if (kind == PairKind::dmrl_example) return {kDmrlX, kDmrlY};
    if (kind == PairKind::qmit_example) return {std::string("hazard:") + kHazardPsi, kQmitY};
    const std::string q = base_quantile(s, bounded);
    const std::string qx = "(" + q + ")";
    switch (kind) {
        case PairKind::scale: return {"q:" + q, "q:" + num(s.uniform(1.0, 2.5)) + "*" + qx};
        case PairKind::shift: return {"q:" + q, "q:" + qx + " + " + num(s.uniform(0.1, 2.0))};
        case PairKind::dispersive:
            return {"q:" + q, "q:" + qx + " + " + num(s.uniform(0.1, 1.0)) + "*p^" +
                                  num(s.uniform(1.0, 3.0))};
        case PairKind::ttt_only: {
            const double c = s.uniform(0.5, 1.5);
            double b = s.uniform(0.1, 1.0);
            if (c > 0.5) {
                const double m = min_slope(q, 1.0 / (2.0 * c), 1.0);
                b = std::min(b, std::floor(s.uniform(0.2, 0.9) * m / (2.0 * c - 1.0) * 1000.0) /
                                    1000.0);
            }
            if (b <= 0.0) b = 0.001;
            return {"q:" + q, "q:" + qx + " + " + num(b) + "*(p - " + num(c) + "*p^2)"};
        }
        case PairKind::ew_only: {
            // X gets the slope b c at 0 so that q_Y stays increasing; the
            // constant lifts q_Y to non-negative values and leaves ew unchanged.
            const double c = s.uniform(0.2, 2.0 / 3.0);
            const double b = s.uniform(0.1, 1.0);
            const std::string xq = "(" + q + ") + " + num(b * c) + "*p";
            return {"q:" + xq, "q:" + xq + " + " + num(b) + "*(p^2 - " + num(c) + "*p) + " +
                                   num(b * c * c / 4.0)};
        }
        case PairKind::convex:
        case PairKind::swapped: {
            const std::string y = "q:" + num(s.uniform(0.5, 2.0)) + "*" + qx + "^" +
                                  num(s.uniform(1.0, 2.5));
            if (kind == PairKind::swapped) return {y, "q:" + q};
            return {"q:" + q, y};
        }
        case PairKind::quadratic:
            return {"q:" + q, "q:" + num(s.uniform(0.5, 2.0)) + "*(" + qx + " + " +
                                  num(s.uniform(0.1, 1.0)) + "*" + qx + "^2)"};
        default: break;
    }
    throw std::logic_error("unhandled pair kind");
}

enum class HKind {
    identity,
    power_convex,     // p^k, k >= 1
    power_concave,    // p^k, k <= 1
    dualpower,        // 1 - (1-p)^k, k >= 1
    mix_convex,       // λp + (1-λ)p^k
    mix_concave,      // λp + (1-λ)(1-(1-p)^k)
    flat_start,       // zero up to t, then linear
    exp_tilt,         // p exp(κ(p-1))
    exp_convex,       // (e^{κp} - 1)/(e^κ - 1)
    log_concave,      // ln(1+κp)/ln(1+κ)
    durante_anti,     // signature (2,0,-2,1), generator p^a
    durante_star,     // signature (0,1,1,-1), generator p^a
    diag_star,        // signature (0,0,0,3,-2), diagonal 2p^2 - p^3
    diag_anti,        // 3-out-of-4 with diagonal p/4 + 3/4 (2p^2 - p^3)
    diag_dual_anti,   // signature (0,0,2,-1) with a non-starshaped diagonal
};

const char* name(HKind k) {
    switch (k) {
        case HKind::identity: return "identity";
        case HKind::power_convex: return "power_convex";
        case HKind::power_concave: return "power_concave";
        case HKind::dualpower: return "dualpower";
        case HKind::mix_convex: return "mixture_convex";
        case HKind::mix_concave: return "mixture_concave";
        case HKind::flat_start: return "flat_start";
        case HKind::exp_tilt: return "exp_tilt";
        case HKind::exp_convex: return "exp_convex";
        case HKind::log_concave: return "log_concave";
        case HKind::durante_anti: return "durante_system_2_0_-2_1";
        case HKind::durante_star: return "durante_system_0_1_1_-1";
        case HKind::diag_star: return "diagonal_system_0_0_0_3_-2";
        case HKind::diag_anti: return "diagonal_system_0_6_-8_3";
        case HKind::diag_dual_anti: return "diagonal_system_0_0_2_-1";
    }
    return "?";
}

std::string make_distortion(HKind kind, Sampler& s) {
    switch (kind) {
        case HKind::identity: return "identity";
        case HKind::power_convex: return "power:" + num(s.uniform(1.0, 5.0));
        case HKind::power_concave: return "power:" + num(s.uniform(0.2, 1.0));
        case HKind::dualpower: return "dualpower:" + num(s.uniform(1.0, 5.0));
        case HKind::mix_convex: {
            const double l = s.uniform(0.1, 0.9);
            return "h:" + num(l) + "*p + " + num(1.0 - l) + "*p^" + num(s.uniform(1.5, 4.0));
        }
        case HKind::mix_concave: {
            const double l = s.uniform(0.1, 0.9);
            return "h:" + num(l) + "*p + " + num(1.0 - l) + "*(1-(1-p)^" +
                   num(s.uniform(1.5, 4.0)) + ")";
        }
        case HKind::flat_start: {
            const double t = s.uniform(0.05, 0.4);
            return "h:max(0, (p - " + num(t) + ")/" + num(1.0 - t) + ")";
        }
        case HKind::exp_tilt: return "h:p*exp(" + num(s.uniform(0.2, 3.0)) + "*(p-1))";
        case HKind::exp_convex: {
            const std::string k = num(s.uniform(0.5, 4.0));
            return "h:(exp(" + k + "*p)-1)/(exp(" + k + ")-1)";
        }
        case HKind::log_concave: {
            const std::string k = num(s.uniform(0.5, 10.0));
            return "h:ln(1+" + k + "*p)/ln(1+" + k + ")";
        }
        case HKind::durante_anti: {
            const std::string a = num(s.uniform(0.2, 1.0));
            return "h:2*p - 2*p*p^(2*" + a + ") + p*p^(3*" + a + ")";
        }
        case HKind::durante_star: {
            const std::string a = num(s.uniform(0.2, 1.0));
            return "h:p*p^" + a + " + p*p^(2*" + a + ") - p*p^(3*" + a + ")";
        }
        case HKind::diag_star: return "h:3/4*p + 1/4*(2*p^2-p^3)";
        case HKind::diag_anti: return "h:4/3*p - 1/3*(1/4*p+3/4*(2*p^2-p^3))";
        case HKind::diag_dual_anti:
            return std::string("h:2/3*p + 1/3*(") + fixtures::kQmitDiag + ")";
    }
    throw std::logic_error("unhandled distortion kind");
}

struct SuiteCatalog {
    std::vector<PairKind> pairs;
    std::vector<HKind> distortions;
};

SuiteCatalog catalog(SweepSuite suite) {
    using P = PairKind;
    using H = HKind;
    switch (suite) {
        case SweepSuite::ttt:
            return {{P::scale, P::shift, P::dispersive, P::ttt_only},
                    {H::identity, H::power_convex, H::mix_convex, H::flat_start, H::exp_tilt,
                     H::exp_convex, H::durante_star, H::diag_star}};
        case SweepSuite::ew:
            return {{P::scale, P::shift, P::dispersive, P::ew_only},
                    {H::identity, H::power_concave, H::dualpower, H::mix_concave, H::log_concave,
                     H::durante_anti, H::diag_anti}};
        case SweepSuite::dmrl:
            return {{P::scale, P::shift, P::convex, P::quadratic, P::dmrl_example},
                    {H::identity, H::power_concave, H::dualpower, H::mix_concave, H::log_concave,
                     H::durante_anti, H::diag_anti}};
        case SweepSuite::qmit:
            return {{P::scale, P::shift, P::convex, P::quadratic, P::qmit_example},
                    {H::identity, H::power_convex, H::mix_convex, H::exp_tilt, H::exp_convex,
                     H::diag_dual_anti}};
        case SweepSuite::convex_transform:
        case SweepSuite::star:
            return {{P::scale, P::shift, P::dispersive, P::ttt_only, P::convex, P::quadratic,
                     P::swapped, P::dmrl_example},
                    {H::identity, H::power_convex, H::power_concave, H::dualpower, H::mix_convex,
                     H::mix_concave, H::exp_tilt, H::exp_convex, H::log_concave, H::durante_anti,
                     H::durante_star, H::diag_star, H::diag_anti, H::diag_dual_anti}};
    }
    return {};
}

OrderKind order_of(SweepSuite s) {
    switch (s) {
        case SweepSuite::ttt: return OrderKind::ttt;
        case SweepSuite::ew: return OrderKind::ew;
        case SweepSuite::dmrl: return OrderKind::dmrl;
        case SweepSuite::qmit: return OrderKind::qmit;
        case SweepSuite::convex_transform: return OrderKind::convex_transform;
        case SweepSuite::star: return OrderKind::star;
    }
    return OrderKind::ttt;
}

std::string describe_failure(const OrderVerdict& v) {
    if (v.witnesses.empty()) return "no witness";
    const auto& w = v.witnesses.front();
    return std::to_string(v.witnesses.size()) + " witness(es), first at p=" + format_number(w.p) +
           " margin=" + format_number(w.margin);
}

// The shape the preservation result needs, checked on the grid so a catalog
// mistake shows up as a failure instead of a silent pass.
std::optional<std::string> hypothesis_gap(SweepSuite suite, const Distortion& h,
                                          const Grid& grid) {
    const auto shape = classify(h, grid);
    switch (suite) {
        case SweepSuite::ttt:
            if (!shape.starshaped) return "distortion is not starshaped";
            break;
        case SweepSuite::ew:
        case SweepSuite::dmrl:
            if (!shape.antistarshaped || !shape.strictly_increasing)
                return "distortion is not strictly increasing and antistarshaped";
            break;
        case SweepSuite::qmit:
            if (!shape.strictly_increasing || !classify(dual(h), grid).antistarshaped)
                return "distortion is not strictly increasing with antistarshaped dual";
            break;
        case SweepSuite::convex_transform:
        case SweepSuite::star:
            if (!shape.strictly_increasing) return "distortion is not strictly increasing";
            break;
    }
    return std::nullopt;
}

}  // namespace

std::string to_string(SweepSuite s) {
    for (const auto& [k, n] : kSuiteNames)
        if (k == s) return n;
    return "unknown";
}

SweepSuite parse_sweep_suite(std::string_view name) {
    for (const auto& [k, n] : kSuiteNames)
        if (name == n) return k;
    if (name == "c" || name == "convex") return SweepSuite::convex_transform;
    throw std::invalid_argument("unknown sweep suite '" + std::string(name) + "'");
}

const std::array<SweepSuite, 6>& all_sweep_suites() {
    static const std::array<SweepSuite, 6> all{SweepSuite::ttt,  SweepSuite::ew,
                                               SweepSuite::dmrl, SweepSuite::qmit,
                                               SweepSuite::convex_transform, SweepSuite::star};
    return all;
}

SweepConfig SweepConfig::from_json(const json& j) {
    SweepConfig c;
    if (!j.is_object()) throw std::invalid_argument("sweep config must be a JSON object");
    auto count = [&](const char* key) -> std::uint64_t {
        const auto& v = j.at(key);
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
            throw std::invalid_argument(std::string(key) + " must be a non-negative integer");
        return v.get<std::uint64_t>();
    };
    if (j.contains("seed")) c.seed = count("seed");
    if (j.contains("trials")) c.trials = count("trials");
    if (j.contains("grid_count")) c.grid_count = count("grid_count");
    if (j.contains("tolerance")) c.tolerance = j.at("tolerance").get<double>();
    if (j.contains("suites")) {
        c.suites.clear();
        for (const auto& s : j.at("suites")) c.suites.push_back(parse_sweep_suite(s.get<std::string>()));
    }
    if (c.grid_count < Grid::kMinCount)
        throw std::invalid_argument("grid_count must be at least " +
                                    std::to_string(Grid::kMinCount));
    if (!(c.tolerance > 0.0) || !std::isfinite(c.tolerance))
        throw std::invalid_argument("tolerance must be positive");
    return c;
}

json SweepConfig::to_json() const {
    json suites_j = json::array();
    for (auto s : suites) suites_j.push_back(to_string(s));
    return {{"seed", seed},
            {"trials", trials},
            {"suites", suites_j},
            {"grid_count", grid_count},
            {"tolerance", tolerance}};
}

bool SweepSummary::ok() const {
    for (const auto& s : suites)
        if (!s.failures.empty()) return false;
    return true;
}

json SweepSummary::to_json() const {
    json out{{"config", config.to_json()}, {"ok", ok()}};
    json list = json::array();
    for (const auto& s : suites) {
        json failures = json::array();
        for (const auto& f : s.failures)
            failures.push_back({{"x", f.trial.x},
                                {"y", f.trial.y},
                                {"h", f.trial.h},
                                {"pair_kind", f.trial.pair_kind},
                                {"h_kind", f.trial.h_kind},
                                {"detail", f.detail}});
        list.push_back({{"suite", to_string(s.suite)},
                        {"trials", s.trials},
                        {"passed", s.passed},
                        {"failed", s.trials - s.passed},
                        {"counterexamples", failures}});
    }
    out["suites"] = list;
    return out;
}

std::vector<Trial> generate_trials(SweepSuite suite, std::uint64_t seed, std::size_t trials) {
    const auto index = static_cast<std::uint64_t>(suite) + 1;
    Sampler s(seed ^ (0x9E3779B97F4A7C15ULL * index));
    const auto cat = catalog(suite);
    std::vector<Trial> out;
    out.reserve(trials);
    for (std::size_t i = 0; i < trials; ++i) {
        const PairKind pk = cat.pairs[s.pick(cat.pairs.size())];
        const HKind hk = cat.distortions[s.pick(cat.distortions.size())];
        // p^k with k < 1 turns exponential tails into much heavier ones whose
        // mass lies beyond the last representable p below 1.
        auto [x, y] = make_pair(pk, s, hk == HKind::power_concave);
        out.push_back({std::move(x), std::move(y), make_distortion(hk, s), name(pk), name(hk)});
    }
    return out;
}

TrialOutcome run_trial(SweepSuite suite, const Trial& trial, const Grid& grid,
                       const Tolerance& tol) {
    TrialOutcome out{trial, true, ""};
    try {
        const auto x = parse_distribution(trial.x, grid);
        const auto y = parse_distribution(trial.y, grid);
        const auto h = parse_distortion(trial.h, grid);
        if (auto gap = hypothesis_gap(suite, h, grid)) {
            out.passed = false;
            out.detail = "catalog error: " + *gap;
            return out;
        }
        const auto kind = order_of(suite);
        const auto base = check_order(x, y, kind, grid, tol);
        const auto xh = distort(x, h), yh = distort(y, h);

        if (suite == SweepSuite::convex_transform || suite == SweepSuite::star) {
            std::vector<double> matched;
            matched.reserve(grid.size());
            const auto hd = dual(h);
            for (double p : grid.points()) matched.push_back(hd(p));
            const auto mgrid = Grid::from_points(std::move(matched));
            const auto distorted = check_order(xh, yh, kind, mgrid, tol);
            if (distorted.holds != base.holds) {
                out.passed = false;
                out.detail = "verdict changed under distortion: base holds=" +
                             std::string(base.holds ? "true" : "false") +
                             ", distorted holds=" + (distorted.holds ? "true" : "false") + "; " +
                             describe_failure(base.holds ? distorted : base);
            }
            return out;
        }

        if (!base.holds) {
            out.passed = false;
            out.detail = "base pair not ordered: " + describe_failure(base);
            return out;
        }
        const auto distorted = check_order(xh, yh, kind, grid, tol);
        if (!distorted.holds) {
            out.passed = false;
            out.detail = "order not preserved: " + describe_failure(distorted);
        }
    } catch (const std::exception& e) {
        out.passed = false;
        out.detail = std::string("error: ") + e.what();
    }
    return out;
}

SweepSummary run_sweep(const SweepConfig& config) {
    SweepSummary summary{config, {}};
    const auto grid = Grid::uniform(config.grid_count);
    const Tolerance tol{config.tolerance, 1e-12};
    for (auto suite : config.suites) {
        SuiteResult r{suite, config.trials, 0, {}};
        for (const auto& trial : generate_trials(suite, config.seed, config.trials)) {
            auto outcome = run_trial(suite, trial, grid, tol);
            if (outcome.passed)
                ++r.passed;
            else
                r.failures.push_back(std::move(outcome));
        }
        summary.suites.push_back(std::move(r));
    }
    return summary;
}

}  // namespace storder
