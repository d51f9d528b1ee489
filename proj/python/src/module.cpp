#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "storder/repro.hpp"
#include "storder/specs.hpp"
#include "storder/sweep.hpp"

namespace py = pybind11;
using namespace storder;

namespace {

// Documents cross the boundary as JSON text; the package decodes them.
std::string check(const std::string& x, const std::string& y, const std::string& order,
                  const std::string& distortion, std::size_t grid_count, bool curve) {
    const auto grid = Grid::uniform(grid_count);
    auto dx = parse_distribution(x, grid);
    auto dy = parse_distribution(y, grid);
    if (!distortion.empty()) {
        const auto h = parse_distortion(distortion, grid);
        dx = distort(dx, h);
        dy = distort(dy, h);
    }
    const auto v = check_order(dx, dy, parse_order_kind(order), grid);
    return to_json(v, dx.label() + " vs " + dy.label(), curve).dump();
}

std::string classify_h(const std::string& h, std::size_t grid_count) {
    const auto grid = Grid::uniform(grid_count);
    return distortion_report(parse_distortion(h, grid), grid).dump();
}

std::string classify_sys(const std::string& signature, const std::string& copula,
                         std::size_t grid_count) {
    const auto grid = Grid::uniform(grid_count);
    return system_report(MinimalSignature::parse(signature), parse_copula(copula, grid), grid)
        .dump();
}

std::vector<double> system_h(const std::string& signature, const std::string& copula,
                             const std::vector<double>& ps) {
    const auto grid = Grid::uniform();
    const auto s = system_distortion(MinimalSignature::parse(signature), parse_copula(copula, grid),
                                     grid);
    std::vector<double> out;
    out.reserve(ps.size());
    for (double p : ps) out.push_back(s.h(p));
    return out;
}

template <class F>
std::vector<double> map_quantile(const std::string& x, const std::vector<double>& ps, F f) {
    const auto d = parse_distribution(x);
    std::vector<double> out;
    out.reserve(ps.size());
    for (double p : ps) out.push_back(f(d, p));
    return out;
}

std::string repro(const std::string& target) {
    const auto r = reproduce(parse_repro_target(target));
    json tables = json::object();
    for (const auto& t : r.tables) tables[t.name] = to_csv(t);
    return json{{"target", to_string(r.target)}, {"summary", r.summary}, {"tables", tables}}.dump();
}

std::string sweep(const std::string& config) {
    return run_sweep(SweepConfig::from_json(json::parse(config))).to_json().dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Stochastic order checks for distorted lifetime distributions.";

    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ArithmeticError);

    m.def("check_order", &check, py::arg("x"), py::arg("y"), py::arg("order"),
          py::arg("distortion") = "", py::arg("grid_count") = 512, py::arg("curve") = false);
    m.def("classify_distortion", &classify_h, py::arg("h"), py::arg("grid_count") = 512);
    m.def("classify_system", &classify_sys, py::arg("signature"), py::arg("copula"),
          py::arg("grid_count") = 512);
    m.def("system_distortion", &system_h, py::arg("signature"), py::arg("copula"), py::arg("p"));
    m.def("quantile", [](const std::string& x, const std::vector<double>& p) {
        return map_quantile(x, p, [](const Distribution& d, double v) { return d.quantile(v); });
    }, py::arg("x"), py::arg("p"));
    m.def("ttt", [](const std::string& x, const std::vector<double>& p) {
        return map_quantile(x, p, [](const Distribution& d, double v) { return ttt_transform(d, v); });
    }, py::arg("x"), py::arg("p"));
    m.def("excess_wealth", [](const std::string& x, const std::vector<double>& p) {
        return map_quantile(x, p, [](const Distribution& d, double v) { return excess_wealth(d, v); });
    }, py::arg("x"), py::arg("p"));
    m.def("mean", [](const std::string& x) { return parse_distribution(x).mean(); }, py::arg("x"));
    m.def("reproduce", &repro, py::arg("target"));
    m.def("targets", [] {
        std::vector<std::string> out;
        for (auto t : all_repro_targets()) out.push_back(to_string(t));
        return out;
    });
    m.def("sweep", &sweep, py::arg("config") = "{}");
}
