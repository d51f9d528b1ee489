#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "storder/repro.hpp"
#include "storder/report.hpp"
#include "storder/specs.hpp"
#include "storder/sweep.hpp"

namespace fs = std::filesystem;
using namespace storder;

namespace {

enum Exit { kHolds = 0, kViolated = 1, kInputError = 2, kSweepFailure = 3, kIoError = 4 };

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << content;
    if (!out.flush()) throw IoError("cannot write " + path.string());
}

std::string dump(const json& j) { return j.dump(1) + "\n"; }

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    json j = json::parse(read_file(path));
    if (!j.is_object()) throw std::invalid_argument(path + ": configuration must be a JSON object");
    return j;
}

// Flag value when given, else the config entry, else the fallback.
std::string pick(const std::string& flag, const json& cfg, const char* key,
                 const std::string& fallback = {}) {
    if (!flag.empty()) return flag;
    if (cfg.contains(key)) return cfg.at(key).get<std::string>();
    return fallback;
}

struct GridOptions {
    std::size_t count = 0;
    double margin = 0.0;

    void add(CLI::App& app) {
        app.add_option("--grid-count", count, "number of grid points (default 512)");
        app.add_option("--grid-margin", margin, "offset of the grid from 0 and 1 (default 1e-3)");
    }

    Grid make(const json& cfg) const {
        std::size_t n = 512;
        double m = 1e-3;
        if (cfg.contains("grid")) {
            const auto& g = cfg.at("grid");
            n = g.value("count", n);
            m = g.value("margin", m);
        }
        if (count) n = count;
        if (margin > 0.0) m = margin;
        return Grid::uniform(n, m);
    }
};

// ---------------------------------------------------------------------------

struct CheckOrderArgs {
    std::string config, x, y, distortion, out, scenario;
    std::vector<std::string> orders;
    bool curves = false;
    GridOptions grid;
};

int run_check_order(const CheckOrderArgs& a) {
    const json cfg = load_config(a.config);
    const Grid grid = a.grid.make(cfg);
    const std::string name = pick(a.scenario, cfg, "name", "scenario");
    const std::string xs = pick(a.x, cfg, "x");
    const std::string ys = pick(a.y, cfg, "y");
    if (xs.empty() || ys.empty()) throw std::invalid_argument("check-order needs --x and --y");
    const std::string hs = pick(a.distortion, cfg, "distortion");

    std::vector<std::string> order_names = a.orders;
    if (order_names.empty() && cfg.contains("orders"))
        order_names = cfg.at("orders").get<std::vector<std::string>>();
    if (order_names.empty()) throw std::invalid_argument("check-order needs at least one --order");
    std::vector<OrderKind> orders;
    for (const auto& o : order_names) orders.push_back(parse_order_kind(o));

    bool want_curves = a.curves;
    if (cfg.contains("outputs"))
        for (const auto& o : cfg.at("outputs"))
            if (o.get<std::string>() == "curve-csv") want_curves = true;

    Distribution x = parse_distribution(xs, grid);
    Distribution y = parse_distribution(ys, grid);
    if (!hs.empty()) {
        const auto h = parse_distortion(hs, grid);
        x = distort(x, h);
        y = distort(y, h);
    }

    bool all_hold = true;
    json docs = json::array();
    for (OrderKind kind : orders) {
        const auto v = check_order(x, y, kind, grid);
        all_hold = all_hold && v.holds;
        json doc = to_json(v, name);
        if (!a.out.empty()) {
            const fs::path dir(a.out);
            const std::string stem = name + "_" + to_string(kind);
            write_file(dir / (stem + ".json"), dump(doc));
            if (want_curves) write_file(dir / (stem + ".csv"), to_csv(curve_table(v, stem)));
        }
        docs.push_back(std::move(doc));
    }
    std::cout << dump(docs.size() == 1 ? docs[0] : docs);
    return all_hold ? kHolds : kViolated;
}

// ---------------------------------------------------------------------------

struct ClassifyArgs {
    std::string h, signature, copula, out;
    GridOptions grid;
};

int run_classify(const ClassifyArgs& a) {
    const Grid grid = a.grid.make(json::object());
    json report;
    if (!a.h.empty()) {
        report = distortion_report(parse_distortion(a.h, grid), grid);
    } else if (!a.signature.empty() && !a.copula.empty()) {
        const auto sig = MinimalSignature::parse(a.signature);
        report = system_report(sig, parse_copula(a.copula, grid), grid);
    } else {
        throw std::invalid_argument("classify needs --h, or --signature with --copula");
    }
    if (!a.out.empty()) write_file(a.out, dump(report));
    std::cout << dump(report);
    return kHolds;
}

// ---------------------------------------------------------------------------

struct DistortArgs {
    std::string x, h, out;
    GridOptions grid;
};

int run_distort(const DistortArgs& a) {
    const Grid grid = a.grid.make(json::object());
    if (a.x.empty() || a.h.empty()) throw std::invalid_argument("distort needs --x and --h");
    const auto x = parse_distribution(a.x, grid);
    const auto h = parse_distortion(a.h, grid);
    const auto xh = distort(x, h);
    Table t{"distorted", "quantile of " + a.x + " distorted by " + h.label() + " on " +
                             grid.describe(),
            {"p", "q", "q_h"}, {}};
    for (double p : grid.points()) t.rows.push_back({p, x.quantile(p), xh.quantile(p)});
    const std::string csv = to_csv(t);
    if (!a.out.empty())
        write_file(a.out, csv);
    else
        std::cout << csv;
    return kHolds;
}

// ---------------------------------------------------------------------------

struct SystemArgs {
    std::string signature, copula, out;
    GridOptions grid;
};

int run_system(const SystemArgs& a) {
    const Grid grid = a.grid.make(json::object());
    if (a.signature.empty() || a.copula.empty())
        throw std::invalid_argument("system needs --signature and --copula");
    const auto sig = MinimalSignature::parse(a.signature);
    const auto copula = parse_copula(a.copula, grid);
    const auto system = system_distortion(sig, copula, grid);
    Table t{"h_T", "system distortion h_T(p) on " + grid.describe(), {"p", "value"}, {}};
    for (double p : grid.points()) t.rows.push_back({p, system.h(p)});
    const json report = system_report(sig, copula, grid);
    if (!a.out.empty()) {
        const fs::path dir(a.out);
        write_file(dir / "system_h_T.csv", to_csv(t));
        write_file(dir / "system.json", dump(report));
        std::cout << dump(report);
    } else {
        std::cout << dump(report) << to_csv(t);
    }
    return kHolds;
}

// ---------------------------------------------------------------------------

struct ReproduceArgs {
    std::vector<std::string> targets;
    std::string out = ".";
    GridOptions grid;
};

int run_reproduce(const ReproduceArgs& a) {
    const Grid grid = a.grid.make(json::object());
    std::vector<ReproTarget> targets;
    for (const auto& t : a.targets) {
        if (t == "all") {
            targets.assign(all_repro_targets().begin(), all_repro_targets().end());
        } else {
            targets.push_back(parse_repro_target(t));
        }
    }
    if (targets.empty()) throw std::invalid_argument("reproduce needs a target");
    const fs::path dir(a.out);
    for (ReproTarget target : targets) {
        const auto r = reproduce(target, grid);
        const std::string stem = to_string(target);
        for (const auto& t : r.tables) write_file(dir / (stem + "_" + t.name + ".csv"), to_csv(t));
        write_file(dir / (stem + ".json"), dump(r.summary));
        std::cout << stem << ": " << r.tables.size() << " tables written to " << dir.string()
                  << "\n";
    }
    return kHolds;
}

// ---------------------------------------------------------------------------

struct SweepArgs {
    std::string config, out;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::vector<std::string> suites;
};

int run_sweep_cmd(const SweepArgs& a) {
    SweepConfig cfg = SweepConfig::from_json(load_config(a.config));
    if (a.seed) cfg.seed = *a.seed;
    if (a.trials) cfg.trials = *a.trials;
    if (!a.suites.empty()) {
        cfg.suites.clear();
        for (const auto& s : a.suites) cfg.suites.push_back(parse_sweep_suite(s));
    }
    const auto summary = run_sweep(cfg);
    const json doc = summary.to_json();
    if (!a.out.empty()) write_file(a.out, dump(doc));
    std::cout << dump(doc);
    return summary.ok() ? kHolds : kSweepFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stochastic order checks, distortion shapes and coherent-system distortions"};
    app.set_help_flag("--help", "print this help message and exit");
    app.require_subcommand(1);

    CheckOrderArgs co;
    auto* check = app.add_subcommand("check-order", "compare X and Y in one or more orders");
    check->add_option("--config", co.config, "scenario JSON");
    check->add_option("--x", co.x, "distribution of X");
    check->add_option("--y", co.y, "distribution of Y");
    check->add_option("--order", co.orders, "ttt, ew, dmrl, qmit, c or star")->delimiter(',');
    check->add_option("--distort", co.distortion, "distortion applied to both X and Y");
    check->add_option("--scenario", co.scenario, "name used in the verdict and file names");
    check->add_option("--out", co.out, "directory for verdict JSON and curve CSV files");
    check->add_flag("--curves", co.curves, "also write the curve CSV");
    co.grid.add(*check);

    ClassifyArgs cl;
    auto* classify_cmd = app.add_subcommand("classify", "shape of a distortion or system");
    classify_cmd->add_option("--h", cl.h, "distortion");
    classify_cmd->add_option("--signature", cl.signature, "minimal signature a_1,...,a_n");
    classify_cmd->add_option("--copula", cl.copula, "survival copula");
    classify_cmd->add_option("--out", cl.out, "report file");
    cl.grid.add(*classify_cmd);

    DistortArgs di;
    auto* distort_cmd = app.add_subcommand("distort", "quantile table of a distorted distribution");
    distort_cmd->add_option("--x", di.x, "distribution");
    distort_cmd->add_option("--h", di.h, "distortion");
    distort_cmd->add_option("--out", di.out, "CSV file");
    di.grid.add(*distort_cmd);

    SystemArgs sy;
    auto* system_cmd = app.add_subcommand("system", "h_T table and classification of a system");
    system_cmd->add_option("--signature", sy.signature, "minimal signature a_1,...,a_n");
    system_cmd->add_option("--copula", sy.copula, "survival copula");
    system_cmd->add_option("--out", sy.out, "directory for system_h_T.csv and system.json");
    sy.grid.add(*system_cmd);

    ReproduceArgs re;
    auto* repro_cmd = app.add_subcommand("reproduce", "curves and summaries of the worked examples");
    repro_cmd->add_option("target", re.targets, "ce02, ce01, ex_durante_1, ex_durante_2, "
                                                "ex_diag_5comp, ex_3of4, ex_qmit or all")
        ->required();
    repro_cmd->add_option("--out", re.out, "output directory");
    re.grid.add(*repro_cmd);

    SweepArgs sw;
    auto* sweep_cmd = app.add_subcommand("sweep", "randomized preservation trials");
    sweep_cmd->add_option("--config", sw.config, "sweep JSON: seed, trials, suites, grid_count, tolerance");
    sweep_cmd->add_option("--seed", sw.seed, "64-bit seed");
    sweep_cmd->add_option("--trials", sw.trials, "trials per suite");
    sweep_cmd->add_option("--suite", sw.suites, "suites to run")->delimiter(',');
    sweep_cmd->add_option("--out", sw.out, "summary file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kHolds : kInputError;
    }

    try {
        if (*check) return run_check_order(co);
        if (*classify_cmd) return run_classify(cl);
        if (*distort_cmd) return run_distort(di);
        if (*system_cmd) return run_system(sy);
        if (*repro_cmd) return run_reproduce(re);
        if (*sweep_cmd) return run_sweep_cmd(sw);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIoError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    }
    return kInputError;
}
