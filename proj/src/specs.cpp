#include "storder/specs.hpp"

#include <cctype>
#include <stdexcept>
#include <string>

namespace storder {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool starts_with(std::string_view s, std::string_view prefix) {
    return s.substr(0, prefix.size()) == prefix;
}

double parse_number(std::string_view text, const char* what) {
    const std::string s(trim(text));
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    // Allow constant expressions such as 1/3.
    try {
        return Expr::parse(s, "p").eval(0.0);
    } catch (const Error&) {
        throw std::invalid_argument(std::string("expected a number for ") + what + ", got '" +
                                    s + "'");
    }
}

int parse_dimension(std::string_view text) {
    const std::string s(trim(text));
    std::size_t used = 0;
    int n = 0;
    try {
        n = std::stoi(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size() || n < 2)
        throw std::invalid_argument("expected a dimension >= 2, got '" + s + "'");
    return n;
}

// Splits "<body>,<key>=<value>" at the last top-level occurrence of ",<key>=".
std::pair<std::string_view, std::string_view> split_trailing_key(std::string_view text,
                                                                  std::string_view key) {
    int depth = 0;
    std::optional<std::size_t> at;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == ',' && depth == 0 && starts_with(trim(text.substr(i + 1)), key)) at = i;
    }
    if (!at) throw std::invalid_argument("missing '" + std::string(key) + "' in '" +
                                         std::string(text) + "'");
    auto rest = trim(text.substr(*at + 1));
    return {trim(text.substr(0, *at)), trim(rest.substr(key.size()))};
}

Expr parse_in(std::string_view text, std::string_view variable) {
    return Expr::parse(trim(text), variable);
}

}  // namespace

DistributionSpec parse_distribution_spec(std::string_view raw) {
    const auto text = trim(raw);
    if (starts_with(text, "exp:")) return {spec::Exponential{parse_number(text.substr(4), "rate")}};
    if (starts_with(text, "q:")) return {spec::QuantileExpr{parse_in(text.substr(2), "p")}};
    if (starts_with(text, "hazard:"))
        return {spec::HazardExpr{parse_in(text.substr(7), "x")}};
    if (starts_with(text, "distort(") && text.back() == ')') {
        const auto inner = text.substr(8, text.size() - 9);
        auto [base, h] = split_trailing_key(inner, "h=");
        auto base_spec = std::make_shared<DistributionSpec>(parse_distribution_spec(base));
        return {spec::Distorted{std::move(base_spec), parse_distortion(h)}};
    }
    throw std::invalid_argument("unknown distribution spec '" + std::string(text) +
                                "' (expected exp:, q:, hazard: or distort(...))");
}

Distribution parse_distribution(std::string_view text, const Grid& grid) {
    return build(parse_distribution_spec(text), grid);
}

Distortion parse_distortion(std::string_view raw, const Grid& grid) {
    const auto text = trim(raw);
    if (text == "identity") return Distortion::identity();
    if (starts_with(text, "power:")) return Distortion::power(parse_number(text.substr(6), "k"));
    if (starts_with(text, "dualpower:"))
        return Distortion::dual_power(parse_number(text.substr(10), "k"));
    if (starts_with(text, "h:")) return Distortion::from_expr(parse_in(text.substr(2), "p"), grid);
    return Distortion::from_expr(parse_in(text, "p"), grid);
}

CopulaHandle parse_copula(std::string_view raw, const Grid& grid) {
    const auto text = trim(raw);
    if (starts_with(text, "durante:")) {
        auto body = trim(text.substr(8));
        if (!starts_with(body, "f=")) throw std::invalid_argument("durante copula needs f=<expr>");
        auto [f, n] = split_trailing_key(body.substr(2), "n=");
        return durante_copula(validate_generator(parse_in(f, "p"), parse_dimension(n), grid));
    }
    if (starts_with(text, "diagonal:")) {
        auto body = trim(text.substr(9));
        if (!starts_with(body, "d=")) throw std::invalid_argument("diagonal copula needs d=<expr>");
        auto [d, n] = split_trailing_key(body.substr(2), "n=");
        return jaworski_copula(validate_diagonal(parse_in(d, "p"), parse_dimension(n), grid));
    }
    if (starts_with(text, "product:")) return product_copula(parse_dimension(text.substr(8)));
    if (starts_with(text, "comonotone:"))
        return comonotone_copula(parse_dimension(text.substr(11)));
    if (starts_with(text, "cuadras-auge:")) {
        auto body = trim(text.substr(13));
        if (!starts_with(body, "theta=")) throw std::invalid_argument("cuadras-auge needs theta=");
        return cuadras_auge_copula(parse_number(body.substr(6), "theta"));
    }
    if (starts_with(text, "frechet:")) {
        auto body = trim(text.substr(8));
        if (!starts_with(body, "gamma=")) throw std::invalid_argument("frechet needs gamma=");
        return frechet_copula(parse_number(body.substr(6), "gamma"));
    }
    throw std::invalid_argument("unknown copula spec '" + std::string(text) + "'");
}

}  // namespace storder
