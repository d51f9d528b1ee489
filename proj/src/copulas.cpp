#include "storder/copulas.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

namespace storder {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void require_dimension(int n) {
    if (n < 2) throw std::invalid_argument("copula dimension must be at least 2");
}

std::vector<double> closed_points(const Grid& grid) {
    std::vector<double> pts{0.0};
    pts.insert(pts.end(), grid.points().begin(), grid.points().end());
    pts.push_back(1.0);
    return pts;
}

struct Failures {
    std::string text;
    std::optional<double> witness;
    void add(const std::string& what, double at) {
        if (!text.empty()) text += "; ";
        text += what + " at " + fmt(at);
        if (!witness) witness = at;
    }
    void raise(const std::string& subject) const {
        if (witness) throw ValidationError(subject + ": " + text, *witness);
    }
};

double generator_f(const copula::Frechet& c, double p) { return c.gamma * p + 1.0 - c.gamma; }

}  // namespace

CopulaHandle product_copula(int n) {
    require_dimension(n);
    return {copula::Product{n}};
}

CopulaHandle comonotone_copula(int n) {
    require_dimension(n);
    return {copula::Comonotone{n}};
}

CopulaHandle cuadras_auge_copula(double theta) {
    if (!(theta > 0.0 && theta < 1.0))
        throw std::invalid_argument("Cuadras-Auge parameter must lie in (0,1)");
    return {copula::CuadrasAuge{theta}};
}

CopulaHandle frechet_copula(double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("Frechet parameter must lie in (0,1)");
    return {copula::Frechet{gamma}};
}

CopulaHandle durante_copula(DuranteGenerator gen) { return {copula::Durante{std::move(gen)}}; }
CopulaHandle jaworski_copula(Diagonal diag) { return {copula::Jaworski{std::move(diag)}}; }

int CopulaHandle::dimension() const {
    return std::visit(
        [](const auto& c) -> int {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, copula::Durante>)
                return c.gen.n;
            else if constexpr (std::is_same_v<T, copula::Jaworski>)
                return c.diag.n;
            else if constexpr (std::is_same_v<T, copula::Product> ||
                               std::is_same_v<T, copula::Comonotone>)
                return c.n;
            else
                return 2;
        },
        form);
}

std::string CopulaHandle::label() const {
    return std::visit(
        [](const auto& c) -> std::string {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, copula::Durante>)
                return "durante:f=" + c.gen.label + ",n=" + std::to_string(c.gen.n);
            else if constexpr (std::is_same_v<T, copula::Jaworski>)
                return "diagonal:d=" + c.diag.label + ",n=" + std::to_string(c.diag.n);
            else if constexpr (std::is_same_v<T, copula::Product>)
                return "product:" + std::to_string(c.n);
            else if constexpr (std::is_same_v<T, copula::Comonotone>)
                return "comonotone:" + std::to_string(c.n);
            else if constexpr (std::is_same_v<T, copula::CuadrasAuge>)
                return "cuadras-auge:theta=" + fmt(c.theta);
            else
                return "frechet:gamma=" + fmt(c.gamma);
        },
        form);
}

double CopulaHandle::operator()(const std::vector<double>& point) const {
    if (static_cast<int>(point.size()) != dimension())
        throw std::invalid_argument("copula evaluated at a point of wrong dimension");
    return std::visit(
        [&](const auto& c) -> double {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, copula::Durante>) {
                return durante_eval(c.gen, point);
            } else if constexpr (std::is_same_v<T, copula::Jaworski>) {
                return jaworski_eval(c.diag, point);
            } else if constexpr (std::is_same_v<T, copula::Product>) {
                double v = 1.0;
                for (double p : point) v *= p;
                return v;
            } else if constexpr (std::is_same_v<T, copula::Comonotone>) {
                return *std::min_element(point.begin(), point.end());
            } else if constexpr (std::is_same_v<T, copula::CuadrasAuge>) {
                const double m = std::min(point[0], point[1]);
                return std::pow(m, c.theta) * std::pow(point[0] * point[1], 1.0 - c.theta);
            } else {
                const double lo = std::min(point[0], point[1]);
                const double hi = std::max(point[0], point[1]);
                return lo * generator_f(c, hi);
            }
        },
        form);
}

DuranteGenerator validate_generator(std::string label, std::function<double(double)> f, int n,
                                    const Grid& grid, const Tolerance& tol) {
    require_dimension(n);
    Failures fail;
    const double f1 = f(1.0);
    if (std::abs(f1 - 1.0) > 1e-12) fail.add("condition i) f(1) = 1 fails", 1.0);

    std::vector<double> pts, vals;
    for (double p : closed_points(grid)) {
        try {
            vals.push_back(f(p));
            pts.push_back(p);
        } catch (const DomainError&) {
            if (p != 0.0) throw;
        }
    }
    for (std::size_t i = 0; i < vals.size(); ++i) {
        if (vals[i] < -1e-12 || vals[i] > 1.0 + 1e-12) {
            fail.add("f leaves [0,1]", pts[i]);
            break;
        }
    }
    if (auto bad = first_reversal(vals, true, tol))
        fail.add("condition ii) f increasing fails", pts[*bad + 1]);

    std::vector<double> ratio_p, ratio;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (pts[i] == 0.0) continue;
        ratio_p.push_back(pts[i]);
        ratio.push_back(vals[i] / pts[i]);
    }
    if (auto bad = first_reversal(ratio, false, tol))
        fail.add("condition iii) f antistarshaped fails", ratio_p[*bad + 1]);
    fail.raise("Durante generator " + label);
    return {std::move(f), n, std::move(label), std::nullopt};
}

DuranteGenerator validate_generator(const Expr& f, int n, const Grid& grid,
                                    const Tolerance& tol) {
    auto gen = validate_generator(f.render(), [f](double p) { return f.eval(p); }, n, grid, tol);
    gen.expr = f;
    return gen;
}

Diagonal validate_diagonal(std::string label, std::function<double(double)> d, int n,
                           const Grid& grid) {
    require_dimension(n);
    Failures fail;
    if (std::abs(d(1.0) - 1.0) > 1e-12) fail.add("property a) d(1) = 1 fails", 1.0);
    const auto pts = closed_points(grid);
    std::vector<double> vals(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) vals[i] = d(pts[i]);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (vals[i] > pts[i] + 1e-12) {
            fail.add("property b) d(p) <= p fails", pts[i]);
            break;
        }
    }
    const double slack = 1e-9 * n;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double rise = vals[i + 1] - vals[i];
        if (rise < -slack || rise > n * (pts[i + 1] - pts[i]) + slack) {
            fail.add("property c) 0 <= d(b) - d(a) <= n (b - a) fails", pts[i + 1]);
            break;
        }
    }
    fail.raise("diagonal " + label);
    return {std::move(d), n, std::move(label), std::nullopt};
}

Diagonal validate_diagonal(const Expr& d, int n, const Grid& grid) {
    auto diag = validate_diagonal(d.render(), [d](double p) { return d.eval(p); }, n, grid);
    diag.expr = d;
    return diag;
}

double durante_eval(const DuranteGenerator& gen, std::vector<double> point) {
    if (point.empty()) throw std::invalid_argument("durante_eval: empty point");
    std::sort(point.begin(), point.end());
    double v = point[0];
    for (std::size_t i = 1; i < point.size(); ++i) v *= gen.f(point[i]);
    return v;
}

double jaworski_f(const Diagonal& d, double u) {
    return (d.n * u - d.d(u)) / (d.n - 1);
}

double jaworski_eval(const Diagonal& d, const std::vector<double>& point) {
    const int n = static_cast<int>(point.size());
    if (n != d.n) throw std::invalid_argument("jaworski_eval: dimension mismatch");
    if (n > kMaxJaworskiDimension)
        throw std::invalid_argument("jaworski_eval: dimension above " +
                                    std::to_string(kMaxJaworskiDimension));
    std::vector<double> fv(n), dv(n);
    for (int k = 0; k < n; ++k) {
        fv[k] = jaworski_f(d, point[k]);
        dv[k] = d.d(point[k]);
    }
    double sum = 0.0;
    for (int i = 1; i <= n; ++i) {
        double m = INFINITY;
        for (int k = 1; k <= n; ++k) {
            int idx = (k + i) % n;
            if (idx == 0) idx = n;
            m = std::min(m, k == n ? dv[idx - 1] : fv[idx - 1]);
        }
        sum += m;
    }
    return sum / n;
}

double boundary_section(const CopulaHandle& c, double p, int i) {
    const int n = c.dimension();
    if (i < 1 || i > n) throw std::invalid_argument("boundary_section: i outside 1..n");
    return std::visit(
        [&](const auto& h) -> double {
            using T = std::decay_t<decltype(h)>;
            if constexpr (std::is_same_v<T, copula::Durante>)
                return p * std::pow(h.gen.f(p), i - 1);
            else if constexpr (std::is_same_v<T, copula::Jaworski>)
                return ((n - i) * jaworski_f(h.diag, p) + i * h.diag.d(p)) / n;
            else if constexpr (std::is_same_v<T, copula::Product>)
                return std::pow(p, i);
            else if constexpr (std::is_same_v<T, copula::Comonotone>)
                return p;
            else if constexpr (std::is_same_v<T, copula::CuadrasAuge>)
                return i == 1 ? p : std::pow(p, 2.0 - h.theta);
            else
                return i == 1 ? p : p * generator_f(h, p);
        },
        c.form);
}

double boundary_section_generic(const CopulaHandle& c, double p, int i) {
    const int n = c.dimension();
    if (i < 1 || i > n) throw std::invalid_argument("boundary_section: i outside 1..n");
    std::vector<double> point(n, 1.0);
    std::fill(point.begin(), point.begin() + i, p);
    return c(point);
}

SpotcheckReport copula_spotcheck(const CopulaHandle& c, const Grid& grid, double tol) {
    SpotcheckReport r;
    const int n = c.dimension();

    for (int k = 0; k < n; ++k) {
        for (double p : grid.points()) {
            std::vector<double> point(n, 1.0);
            point[k] = p;
            const double err = std::abs(c(point) - p);
            r.worst_margin_error = std::max(r.worst_margin_error, err);
            if (err > tol && r.margins) {
                r.margins = false;
                r.failures.push_back("uniform margin fails in coordinate " +
                                     std::to_string(k + 1) + " at p=" + fmt(p));
            }
        }
    }

    std::mt19937_64 rng(0x5eed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<std::vector<double>> bases{std::vector<double>(n, 0.5)};
    for (int b = 0; b < 4; ++b) {
        std::vector<double> point(n);
        for (double& v : point) v = unit(rng);
        bases.push_back(point);
    }
    for (const auto& base : bases) {
        for (int k = 0; k < n && r.monotone; ++k) {
            std::vector<double> point = base;
            std::vector<double> vals;
            for (double p : closed_points(grid)) {
                point[k] = p;
                vals.push_back(c(point));
            }
            if (auto bad = first_reversal(vals, true, {tol, tol})) {
                r.monotone = false;
                r.failures.push_back("not increasing in coordinate " + std::to_string(k + 1));
            }
        }

        std::vector<std::vector<double>> perms;
        auto shifted = base;
        std::rotate(shifted.begin(), shifted.begin() + 1, shifted.end());
        perms.push_back(shifted);
        auto swapped = base;
        std::swap(swapped[0], swapped[1]);
        perms.push_back(swapped);
        perms.emplace_back(base.rbegin(), base.rend());
        const double ref = c(base);
        for (const auto& q : perms) {
            if (std::abs(c(q) - ref) > tol && r.symmetric) {
                r.symmetric = false;
                r.failures.push_back("not symmetric under coordinate permutation");
            }
        }
    }

    if (n == 2) {
        std::vector<double> pts;
        const std::size_t stride = (grid.size() + 63) / 64;
        for (std::size_t i = 0; i < grid.size(); i += stride) pts.push_back(grid[i]);
        bool ok = true;
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            for (std::size_t j = 0; j + 1 < pts.size(); ++j) {
                const double vol = c({pts[i + 1], pts[j + 1]}) - c({pts[i], pts[j + 1]}) -
                                   c({pts[i + 1], pts[j]}) + c({pts[i], pts[j]});
                r.worst_rectangle = std::min(r.worst_rectangle, vol);
                if (vol < -tol) ok = false;
            }
        }
        r.rectangles = ok;
        if (!ok) r.failures.push_back("negative rectangle volume");
    }
    return r;
}

}  // namespace storder
