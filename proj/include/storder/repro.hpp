#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "storder/report.hpp"

namespace storder {

/// Hard-coded inputs of the worked examples.
namespace fixtures {

// dmrl pair that is not ordered in the convex transform order, distorted by p^5.
inline constexpr const char* kDmrlX = "q:17/8*p-1/2*p^2";
inline constexpr const char* kDmrlY = "q:ln(15/8+p)";
inline constexpr const char* kDmrlH = "power:5";

// qmit pair: X with a piecewise cumulative hazard, Y standard exponential,
// distorted by 1-(1-p)^5.
inline constexpr const char* kHazardPsi =
    "piece(x <= 1 : exp(x) - 1 ; x <= 13/10 : 2*e*sqrt(x) - e - 1 ; "
    "else : 5/13*sqrt(10/13)*exp(x^2 - 69/100) + 2*(sqrt(13/10) - 1)*e "
    "- 5/13*sqrt(10/13)*e + e - 1)";
inline constexpr const char* kQmitY = "exp:1";
inline constexpr const char* kQmitH = "dualpower:5";

inline constexpr const char* kDuranteGenerator = "p^0.5";
inline constexpr const char* kDuranteSig1 = "2,0,-2,1";
inline constexpr const char* kDuranteSig2 = "0,1,1,-1";
inline constexpr const char* kDiagSig5 = "0,0,0,3,-2";
inline constexpr const char* kDiag5 = "2*p^2-p^3";
inline constexpr const char* kSig3of4 = "0,6,-8,3";
inline constexpr const char* kDiag3of4 = "1/4*p+3/4*(2*p^2-p^3)";
inline constexpr const char* kQmitSig = "0,0,2,-1";
inline constexpr const char* kQmitDiag = "1-7/4*(1-p)+3/2*(1-p)^2-3/4*(1-p)^3";

std::string durante_copula_spec(int n);
std::string diagonal_copula_spec(const char* d, int n);

}  // namespace fixtures

enum class ReproTarget { ce02, ce01, ex_durante_1, ex_durante_2, ex_diag_5comp, ex_3of4, ex_qmit };

std::string to_string(ReproTarget t);
/// Throws std::invalid_argument for unknown names.
ReproTarget parse_repro_target(std::string_view name);
const std::array<ReproTarget, 7>& all_repro_targets();

struct Reproduction {
    ReproTarget target;
    std::vector<Table> tables;
    json summary;
};

/// Curves and headline numbers of one worked example. Deterministic for a
/// given grid.
Reproduction reproduce(ReproTarget target, const Grid& grid = Grid::uniform());

/// The t-grid of the x-space qmit integral: k/200 for k = 1..400.
std::vector<double> qmit_t_grid();

}  // namespace storder
