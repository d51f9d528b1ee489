#include "storder/report.hpp"

#include <cmath>
#include <cstdio>

namespace storder {

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string to_csv(const Table& table) {
    std::string out;
    if (!table.comment.empty()) out += "# " + table.comment + "\n";
    for (std::size_t i = 0; i < table.columns.size(); ++i)
        out += (i ? "," : "") + table.columns[i];
    out += "\n";
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_number(row[i]);
        out += "\n";
    }
    return out;
}

namespace {

// JSON has no representation for inf/nan.
json number(double v) {
    if (std::isfinite(v)) return v;
    return format_number(v);
}

}  // namespace

json to_json(const Grid& grid) {
    return {{"kind", grid.is_uniform() ? "uniform" : "points"},
            {"count", grid.size()},
            {"lo", grid.lo()},
            {"hi", grid.hi()},
            {"edge_margin", grid.edge_margin()},
            {"first", grid[0]},
            {"last", grid[grid.size() - 1]}};
}

json to_json(const Tolerance& tol) { return {{"abs", tol.abs_tol}, {"rel", tol.rel_tol}}; }

json to_json(const ShapeReport& shape) {
    json w = json::object();
    for (const auto& [name, p] : shape.witnesses) w[name] = p;
    return {{"convex", shape.convex},
            {"concave", shape.concave},
            {"starshaped", shape.starshaped},
            {"antistarshaped", shape.antistarshaped},
            {"strictly_increasing", shape.strictly_increasing},
            {"witnesses", w}};
}

json to_json(const ShapeClassification& c) {
    json out{{"verdict", to_string(c.verdict)}};
    out["threshold"] = c.threshold ? json(c.threshold->render()) : json(nullptr);
    json params = json::object();
    for (const auto& [name, value] : c.parameters) params[name] = value.render();
    out["parameters"] = params;
    out["direct"] = c.direct ? to_json(*c.direct) : json(nullptr);
    if (!c.note.empty()) out["note"] = c.note;
    return out;
}

json to_json(const OrderVerdict& v, const std::string& scenario, bool with_curve) {
    json out{{"scenario", scenario}, {"order", to_string(v.kind)}, {"holds", v.holds}};
    json witnesses = json::array();
    for (const auto& w : v.witnesses) witnesses.push_back({{"p", w.p}, {"margin", number(w.margin)}});
    out["witnesses"] = witnesses;
    out["grid"] = to_json(v.grid);
    out["tolerances"] = to_json(v.tol);
    if (!v.excluded.empty()) out["excluded"] = v.excluded;
    if (v.trend) out["trend"] = to_string(*v.trend);
    if (v.turning_point) out["turning_point"] = *v.turning_point;
    if (v.integral_agrees) out["integral_agrees"] = *v.integral_agrees;
    if (with_curve) {
        json curve = json::array();
        for (const auto& c : v.curve)
            curve.push_back({{"p", c.p},
                             {"value_x", number(c.value_x)},
                             {"value_y", number(c.value_y)},
                             {"functional", number(c.functional)}});
        out["curve"] = curve;
    }
    return out;
}

Table curve_table(const OrderVerdict& v, const std::string& name) {
    Table t{name, to_string(v.kind) + " curve on " + v.grid.describe(),
            {"p", "value_x", "value_y", "functional"}, {}};
    for (const auto& c : v.curve) t.rows.push_back({c.p, c.value_x, c.value_y, c.functional});
    return t;
}

std::string shape_summary(const ShapeReport& shape, const ShapeReport& dual_shape) {
    if (shape.starshaped && shape.antistarshaped) return "both";
    if (shape.starshaped) return "starshaped";
    if (shape.antistarshaped) return "antistarshaped";
    if (dual_shape.antistarshaped) return "dual-antistarshaped";
    return "neither";
}

json distortion_report(const Distortion& h, const Grid& grid) {
    const auto shape = classify(h, grid);
    const auto dual_shape = classify(dual(h), grid);
    json advice = json::object();
    for (auto kind : all_orders())
        advice[to_string(kind)] = to_string(preservation_advice(kind, shape, dual_shape));
    return {{"distortion", h.label()},
            {"provenance", to_string(h.provenance())},
            {"summary", shape_summary(shape, dual_shape)},
            {"shape", to_json(shape)},
            {"dual_shape", to_json(dual_shape)},
            {"advice", advice}};
}

json system_report(const MinimalSignature& sig, const CopulaHandle& copula, const Grid& grid) {
    const auto system = system_distortion(sig, copula, grid);
    const auto c = classify_system(sig, copula, grid);
    json out = distortion_report(system.h, grid);
    if (c.starshaped() && c.antistarshaped())
        out["summary"] = "both";
    else if (c.starshaped())
        out["summary"] = "starshaped";
    else if (c.antistarshaped())
        out["summary"] = "antistarshaped";
    out["signature"] = sig.render();
    out["copula"] = copula.label();
    if (system.closed_form) out["closed_form"] = system.closed_form->render();
    out["classification"] = to_json(c);
    return out;
}

}  // namespace storder
