#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "storder/report.hpp"

namespace storder {

/// Randomized checks of the preservation results.
///
///   ttt        X ≤_ttt Y, h starshaped                     => X_h ≤_ttt Y_h
///   ew         X ≤_ew Y, h antistarshaped, strictly incr.  => X_h ≤_ew Y_h
///   dmrl       X ≤_dmrl Y, same class of h                 => X_h ≤_dmrl Y_h
///   qmit       X ≤_qmit Y, h strictly incr., dual antistarshaped => X_h ≤_qmit Y_h
///   c, star    verdict on the grid p_i equals the verdict for the distorted
///              pair on the matched grid h*(p_i), for any strictly increasing h
enum class SweepSuite { ttt, ew, dmrl, qmit, convex_transform, star };

std::string to_string(SweepSuite s);
SweepSuite parse_sweep_suite(std::string_view name);
const std::array<SweepSuite, 6>& all_sweep_suites();

struct SweepConfig {
    std::uint64_t seed = 20240917;
    std::size_t trials = 200;
    std::vector<SweepSuite> suites{all_sweep_suites().begin(), all_sweep_suites().end()};
    std::size_t grid_count = 128;
    double tolerance = 1e-8;

    /// Reads seed, trials, suites, grid_count and tolerance; absent keys keep
    /// their defaults. Throws std::invalid_argument on bad values.
    static SweepConfig from_json(const json& j);
    json to_json() const;
};

/// One randomized instance, in the textual forms so that it can be re-run.
struct Trial {
    std::string x;
    std::string y;
    std::string h;
    /// Name of the catalog entries the pair and distortion came from.
    std::string pair_kind;
    std::string h_kind;
};

struct TrialOutcome {
    Trial trial;
    bool passed = true;
    std::string detail;
};

struct SuiteResult {
    SweepSuite suite;
    std::size_t trials = 0;
    std::size_t passed = 0;
    std::vector<TrialOutcome> failures;
};

struct SweepSummary {
    SweepConfig config;
    std::vector<SuiteResult> suites;

    bool ok() const;
    json to_json() const;
};

/// The trials of one suite; deterministic in (seed, suite, trials).
std::vector<Trial> generate_trials(SweepSuite suite, std::uint64_t seed, std::size_t trials);

TrialOutcome run_trial(SweepSuite suite, const Trial& trial, const Grid& grid, const Tolerance& tol);

SweepSummary run_sweep(const SweepConfig& config);

}  // namespace storder
