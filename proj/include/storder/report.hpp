#pragma once

#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "storder/distortions.hpp"
#include "storder/orders.hpp"
#include "storder/systems.hpp"

namespace storder {

using json = nlohmann::ordered_json;

/// %.17g.
std::string format_number(double v);

/// A numeric table written as CSV: an optional "# ..." comment line, a
/// header row, then one row per sample.
struct Table {
    std::string name;
    std::string comment;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

std::string to_csv(const Table& table);

json to_json(const Grid& grid);
json to_json(const Tolerance& tol);
json to_json(const ShapeReport& shape);
json to_json(const ShapeClassification& c);

/// Verdict document: scenario, order, holds, witnesses, grid, tolerances and
/// the order-specific extras. The curve is included only when asked for.
json to_json(const OrderVerdict& v, const std::string& scenario, bool with_curve = false);

/// p,value_x,value_y,functional
Table curve_table(const OrderVerdict& v, const std::string& name);

/// Shape flags, dual shape flags, preservation advice per order and a
/// one-word summary for a distortion.
json distortion_report(const Distortion& h, const Grid& grid = Grid::uniform());

/// distortion_report plus signature, copula, closed-form parameters and the
/// closed-form classification of a system distortion.
json system_report(const MinimalSignature& sig, const CopulaHandle& copula,
                   const Grid& grid = Grid::uniform());

/// "starshaped", "antistarshaped", "both", "dual-antistarshaped" or "neither".
std::string shape_summary(const ShapeReport& shape, const ShapeReport& dual_shape);

}  // namespace storder
