#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "storder/funcalc.hpp"
#include "storder/numerics.hpp"

namespace storder {

/// Generator f of the Durante copula C_f(p) = p_[1] * prod_{i>=2} f(p_[i]).
/// Valid iff f(1) = 1, f is increasing and f(p)/p is decreasing.
struct DuranteGenerator {
    std::function<double(double)> f;
    int n = 2;
    std::string label;
    std::optional<Expr> expr;
};

/// n-dimensional diagonal: d(1) = 1, d(p) <= p, 0 <= d(b) - d(a) <= n (b - a).
struct Diagonal {
    std::function<double(double)> d;
    int n = 2;
    std::string label;
    std::optional<Expr> expr;
};

namespace copula {

struct Durante {
    DuranteGenerator gen;
};
struct Jaworski {
    Diagonal diag;
};
struct Product {
    int n;
};
struct Comonotone {
    int n;
};
/// min(p1,p2)^theta (p1 p2)^(1-theta), theta in (0,1).
struct CuadrasAuge {
    double theta;
};
/// Durante copula with f(p) = gamma p + 1 - gamma, gamma in (0,1).
struct Frechet {
    double gamma;
};

}  // namespace copula

/// An exchangeable copula. Usable as survival copula C or distributional
/// copula Ĉ; the role is decided by the caller.
struct CopulaHandle {
    std::variant<copula::Durante, copula::Jaworski, copula::Product, copula::Comonotone,
                 copula::CuadrasAuge, copula::Frechet>
        form;

    int dimension() const;
    std::string label() const;
    double operator()(const std::vector<double>& point) const;
};

CopulaHandle product_copula(int n);
CopulaHandle comonotone_copula(int n);
CopulaHandle cuadras_auge_copula(double theta);
CopulaHandle frechet_copula(double gamma);
CopulaHandle durante_copula(DuranteGenerator gen);
CopulaHandle jaworski_copula(Diagonal diag);

/// Checks conditions i)-iii) on {0} ∪ grid ∪ {1}. Throws ValidationError
/// naming every failed condition; the witness is the first failure.
DuranteGenerator validate_generator(const Expr& f, int n, const Grid& grid = Grid::uniform(),
                                    const Tolerance& tol = kScanTolerance);
DuranteGenerator validate_generator(std::string label, std::function<double(double)> f, int n,
                                    const Grid& grid = Grid::uniform(),
                                    const Tolerance& tol = kScanTolerance);

/// Checks properties a)-c); the Lipschitz bound gets a slack of 1e-9 n.
Diagonal validate_diagonal(const Expr& d, int n, const Grid& grid = Grid::uniform());
Diagonal validate_diagonal(std::string label, std::function<double(double)> d, int n,
                           const Grid& grid = Grid::uniform());

double durante_eval(const DuranteGenerator& gen, std::vector<double> point);

/// f(u) = (n u - d(u)) / (n - 1).
double jaworski_f(const Diagonal& d, double u);

/// Average over the n cyclic shifts tau^i(k) = k + i mod n of
/// min{f(p_tau(1)), ..., f(p_tau(n-1)), d(p_tau(n))}. n is capped at 12.
double jaworski_eval(const Diagonal& d, const std::vector<double>& point);

inline constexpr int kMaxJaworskiDimension = 12;

/// C(p, ..(i).., p, 1, ..., 1) from the family's closed form.
double boundary_section(const CopulaHandle& c, double p, int i);
/// The same section through generic evaluation of C.
double boundary_section_generic(const CopulaHandle& c, double p, int i);

struct SpotcheckReport {
    bool margins = true;
    bool monotone = true;
    bool symmetric = true;
    /// Only evaluated for n = 2.
    std::optional<bool> rectangles;
    double worst_margin_error = 0.0;
    double worst_rectangle = 0.0;
    std::vector<std::string> failures;
    bool ok() const { return failures.empty(); }
};

/// Numerical sanity of the copula axioms: uniform margins, monotonicity in
/// each coordinate, permutation symmetry at sampled points, and for n = 2
/// non-negative rectangle volumes on a grid of at most 64 x 64 points.
SpotcheckReport copula_spotcheck(const CopulaHandle& c, const Grid& grid = Grid::uniform(64),
                                 double tol = 1e-12);

}  // namespace storder
