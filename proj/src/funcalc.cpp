#include "storder/funcalc.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <optional>
#include <type_traits>

namespace storder {

struct Expr::Node {
    enum class Kind { number, euler, variable, neg, add, sub, mul, div, pow, exp, ln, sqrt, min,
                      max, piece };
    Kind kind = Kind::number;
    double value = 0.0;
    std::vector<Node> args;     // piece: branches, the last one is the else-branch
    std::vector<double> guards;  // piece only
    SourceSpan span;
};

using Node = Expr::Node;
using Kind = Node::Kind;

namespace {

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

enum class Tok { number, ident, plus, minus, star, slash, caret, lparen, rparen, comma, semicolon,
                 colon, le, end };

struct Token {
    Tok type;
    std::string text;
    double number = 0.0;
    SourceSpan span;
};

std::vector<Token> tokenize(std::string_view s) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < s.size()) {
        const char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        const std::size_t start = i;
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            while (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.'))
                ++i;
            // exponent part only when followed by a digit (so "2e" is 2 * e)
            if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
                std::size_t j = i + 1;
                if (j < s.size() && (s[j] == '+' || s[j] == '-')) ++j;
                if (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) {
                    i = j;
                    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
                }
            }
            std::string text(s.substr(start, i - start));
            char* endp = nullptr;
            const double v = std::strtod(text.c_str(), &endp);
            if (endp != text.c_str() + text.size())
                throw ParseError("malformed number '" + text + "'", {start, i});
            out.push_back({Tok::number, text, v, {start, i}});
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (i < s.size() &&
                   (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_'))
                ++i;
            out.push_back({Tok::ident, std::string(s.substr(start, i - start)), 0.0, {start, i}});
            continue;
        }
        if (c == '<') {
            if (i + 1 < s.size() && s[i + 1] == '=') {
                out.push_back({Tok::le, "<=", 0.0, {start, start + 2}});
                i += 2;
                continue;
            }
            throw ParseError("expected '<='", {start, start + 1});
        }
        Tok t;
        switch (c) {
            case '+': t = Tok::plus; break;
            case '-': t = Tok::minus; break;
            case '*': t = Tok::star; break;
            case '/': t = Tok::slash; break;
            case '^': t = Tok::caret; break;
            case '(': t = Tok::lparen; break;
            case ')': t = Tok::rparen; break;
            case ',': t = Tok::comma; break;
            case ';': t = Tok::semicolon; break;
            case ':': t = Tok::colon; break;
            default:
                throw ParseError(std::string("unexpected character '") + c + "'",
                                 {start, start + 1});
        }
        out.push_back({t, std::string(1, c), 0.0, {start, start + 1}});
        ++i;
    }
    out.push_back({Tok::end, "", 0.0, {s.size(), s.size()}});
    return out;
}

// ---------------------------------------------------------------------------
// Evaluation (double and forward-mode dual)
// ---------------------------------------------------------------------------

struct Dual {
    double v;
    double d;
};

template <class T>
double val(const T& a) {
    if constexpr (std::is_same_v<T, Dual>)
        return a.v;
    else
        return a;
}

template <class T>
T constant(double c) {
    if constexpr (std::is_same_v<T, Dual>)
        return Dual{c, 0.0};
    else
        return c;
}

template <class T>
T eval_node(const Node& n, const T& x);

bool is_one(const Node& n) { return n.kind == Kind::number && n.value == 1.0; }

// For 1 + e and 1 - e returns (e, +1) and (e, -1), so that ln can use log1p.
std::pair<const Node*, double> one_plus(const Node& n) {
    if (n.kind == Kind::add && is_one(n.args[0])) return {&n.args[1], 1.0};
    if (n.kind == Kind::add && is_one(n.args[1])) return {&n.args[0], 1.0};
    if (n.kind == Kind::sub && is_one(n.args[0])) return {&n.args[1], -1.0};
    return {nullptr, 0.0};
}

template <class T>
T eval_unchecked(const Node& n, const T& x) {
    constexpr bool dual = std::is_same_v<T, Dual>;
    switch (n.kind) {
        case Kind::number: return constant<T>(n.value);
        case Kind::euler: return constant<T>(std::numbers::e);
        case Kind::variable: return x;
        case Kind::neg: {
            const T a = eval_node(n.args[0], x);
            if constexpr (dual) return Dual{-a.v, -a.d};
            else return -a;
        }
        case Kind::add:
        case Kind::sub: {
            if (n.kind == Kind::sub && n.args[0].kind == Kind::exp && is_one(n.args[1])) {
                const T e = eval_node(n.args[0].args[0], x);
                const double v = std::expm1(val(e));
                if constexpr (dual) return Dual{v, (v + 1.0) * e.d};
                else return v;
            }
            if (n.kind == Kind::sub && is_one(n.args[0]) && n.args[1].kind == Kind::pow) {
                // 1 - (1 +- e)^c as -expm1(c log1p(+-e)).
                const Node& pw = n.args[1];
                if (const auto [rest, sign] = one_plus(pw.args[0]); rest) {
                    const double ev = sign * val(eval_node(*rest, x));
                    if (ev > -1.0) {
                        const T c = eval_node(pw.args[1], x);
                        const double v = -std::expm1(val(c) * std::log1p(ev));
                        if constexpr (dual) return Dual{v, -eval_node(pw, x).d};
                        else return v;
                    }
                }
            }
            const T a = eval_node(n.args[0], x);
            const T b = eval_node(n.args[1], x);
            const double s = n.kind == Kind::add ? 1.0 : -1.0;
            if constexpr (dual) return Dual{a.v + s * b.v, a.d + s * b.d};
            else return a + s * b;
        }
        case Kind::mul: {
            const T a = eval_node(n.args[0], x);
            const T b = eval_node(n.args[1], x);
            if constexpr (dual) return Dual{a.v * b.v, a.d * b.v + a.v * b.d};
            else return a * b;
        }
        case Kind::div: {
            const T a = eval_node(n.args[0], x);
            const T b = eval_node(n.args[1], x);
            if (val(b) == 0.0) throw DomainError("division by zero", n.span);
            if constexpr (dual)
                return Dual{a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)};
            else
                return a / b;
        }
        case Kind::pow: {
            const T a = eval_node(n.args[0], x);
            const T b = eval_node(n.args[1], x);
            const double av = val(a), bv = val(b);
            if (av == 0.0 && bv < 0.0) throw DomainError("zero to a negative power", n.span);
            if (av < 0.0 && bv != std::floor(bv))
                throw DomainError("negative base with non-integer exponent", n.span);
            const double v = (bv == 0.0) ? 1.0 : std::pow(av, bv);
            if constexpr (dual) {
                double d = 0.0;
                if (a.d != 0.0) d += bv * std::pow(av, bv - 1.0) * a.d;
                if (b.d != 0.0) {
                    if (av <= 0.0)
                        throw DomainError("variable exponent needs a positive base", n.span);
                    d += v * std::log(av) * b.d;
                }
                return Dual{v, d};
            } else {
                return v;
            }
        }
        case Kind::exp: {
            const T a = eval_node(n.args[0], x);
            const double v = std::exp(val(a));
            if constexpr (dual) return Dual{v, v * a.d};
            else return v;
        }
        case Kind::ln: {
            if (const auto [rest, sign] = one_plus(n.args[0]); rest) {
                const T e = eval_node(*rest, x);
                const double ev = sign * val(e);
                if (!(ev > -1.0)) throw DomainError("ln of a non-positive value", n.span);
                if constexpr (dual) return Dual{std::log1p(ev), sign * e.d / (1.0 + ev)};
                else return std::log1p(ev);
            }
            const T a = eval_node(n.args[0], x);
            if (!(val(a) > 0.0)) throw DomainError("ln of a non-positive value", n.span);
            if constexpr (dual) return Dual{std::log(a.v), a.d / a.v};
            else return std::log(a);
        }
        case Kind::sqrt: {
            const T a = eval_node(n.args[0], x);
            if (val(a) < 0.0) throw DomainError("sqrt of a negative value", n.span);
            const double v = std::sqrt(val(a));
            if constexpr (dual) return Dual{v, a.d == 0.0 ? 0.0 : a.d / (2.0 * v)};
            else return v;
        }
        case Kind::min:
        case Kind::max: {
            T best = eval_node(n.args[0], x);
            for (std::size_t i = 1; i < n.args.size(); ++i) {
                const T c = eval_node(n.args[i], x);
                if (n.kind == Kind::min ? val(c) < val(best) : val(c) > val(best)) best = c;
            }
            return best;
        }
        case Kind::piece: {
            const double xv = val(x);
            for (std::size_t i = 0; i < n.guards.size(); ++i)
                if (xv <= n.guards[i]) return eval_node(n.args[i], x);
            return eval_node(n.args.back(), x);
        }
    }
    throw DomainError("corrupt expression node", n.span);
}

template <class T>
T eval_node(const Node& n, const T& x) {
    const T r = eval_unchecked(n, x);
    if (!std::isfinite(val(r))) throw DomainError("non-finite intermediate value", n.span);
    return r;
}

// n with the variable v replaced by 1 - v; 1 - (1 - f) collapses to f.
Node reflect(const Node& n, bool& ok) {
    auto one_minus = [&](Node inner) {
        Node one;
        one.span = n.span;
        one.value = 1.0;
        Node out;
        out.kind = Kind::sub;
        out.span = n.span;
        out.args = {std::move(one), std::move(inner)};
        return out;
    };
    switch (n.kind) {
        case Kind::variable: return one_minus(n);
        case Kind::piece: ok = false; return n;
        case Kind::sub:
            if (is_one(n.args[0])) {
                Node r = reflect(n.args[1], ok);
                if (r.kind == Kind::sub && is_one(r.args[0])) return std::move(r.args[1]);
                return one_minus(std::move(r));
            }
            break;
        default: break;
    }
    Node out = n;
    for (auto& a : out.args) a = reflect(a, ok);
    return out;
}

bool references_variable(const Node& n) {
    if (n.kind == Kind::variable) return true;
    return std::any_of(n.args.begin(), n.args.end(), references_variable);
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

class Parser {
public:
    Parser(std::string_view text, std::vector<std::string> allowed)
        : text_(text), tokens_(tokenize(text)), allowed_(std::move(allowed)) {}

    Node parse_all() {
        if (tokens_.size() == 1) throw ParseError("empty expression", {0, text_.size()});
        Node root = expr();
        if (peek().type != Tok::end) throw ParseError("unexpected '" + peek().text + "'", peek().span);
        return root;
    }

    std::string variable() const {
        if (chosen_) return *chosen_;
        return allowed_.front();
    }

private:
    const Token& peek() const { return tokens_[pos_]; }
    Token take() { return tokens_[pos_++]; }
    bool accept(Tok t) {
        if (peek().type != t) return false;
        ++pos_;
        return true;
    }
    Token expect(Tok t, const char* what) {
        if (peek().type != t) throw ParseError(std::string("expected ") + what, peek().span);
        return take();
    }

    static Node binary(Kind k, Node lhs, Node rhs) {
        Node n;
        n.kind = k;
        n.span = {lhs.span.start, rhs.span.end};
        n.args.push_back(std::move(lhs));
        n.args.push_back(std::move(rhs));
        return n;
    }

    Node expr() {
        Node lhs = term();
        while (peek().type == Tok::plus || peek().type == Tok::minus) {
            const Kind k = take().type == Tok::plus ? Kind::add : Kind::sub;
            lhs = binary(k, std::move(lhs), term());
        }
        return lhs;
    }

    Node term() {
        Node lhs = unary();
        while (peek().type == Tok::star || peek().type == Tok::slash) {
            const Kind k = take().type == Tok::star ? Kind::mul : Kind::div;
            lhs = binary(k, std::move(lhs), unary());
        }
        return lhs;
    }

    Node unary() {
        if (peek().type == Tok::minus) {
            const Token op = take();
            Node n;
            n.kind = Kind::neg;
            n.args.push_back(unary());
            n.span = {op.span.start, n.args[0].span.end};
            return n;
        }
        return power();
    }

    Node power() {
        Node base = primary();
        if (accept(Tok::caret)) return binary(Kind::pow, std::move(base), exponent());
        return base;
    }

    Node exponent() {
        if (peek().type == Tok::minus) {
            const Token op = take();
            Node n;
            n.kind = Kind::neg;
            n.args.push_back(exponent());
            n.span = {op.span.start, n.args[0].span.end};
            return n;
        }
        return power();
    }

    void bind_variable(const Token& t) {
        if (chosen_) {
            if (*chosen_ != t.text) throw ParseError("unknown identifier '" + t.text + "'", t.span);
            return;
        }
        chosen_ = t.text;
    }

    bool is_variable_name(const std::string& name) const {
        if (chosen_) return name == *chosen_;
        return std::find(allowed_.begin(), allowed_.end(), name) != allowed_.end();
    }

    Node primary() {
        const Token t = take();
        switch (t.type) {
            case Tok::number: {
                Node n;
                n.kind = Kind::number;
                n.value = t.number;
                n.span = t.span;
                return n;
            }
            case Tok::lparen: {
                Node inner = expr();
                const Token close = expect(Tok::rparen, "')'");
                inner.span = {t.span.start, close.span.end};
                return inner;
            }
            case Tok::ident: return identifier(t);
            default: break;
        }
        throw ParseError(t.type == Tok::end ? "unexpected end of input"
                                            : "unexpected '" + t.text + "'",
                         t.span);
    }

    Node identifier(const Token& t) {
        Node n;
        n.span = t.span;
        if (t.text == "e") {
            n.kind = Kind::euler;
            return n;
        }
        if (is_variable_name(t.text)) {
            bind_variable(t);
            n.kind = Kind::variable;
            return n;
        }
        if (t.text == "piece") return piece(t);
        static const std::pair<const char*, Kind> functions[] = {
            {"exp", Kind::exp}, {"ln", Kind::ln}, {"sqrt", Kind::sqrt},
            {"min", Kind::min}, {"max", Kind::max}};
        for (const auto& [name, kind] : functions) {
            if (t.text != name) continue;
            n.kind = kind;
            expect(Tok::lparen, "'(' after function name");
            n.args.push_back(expr());
            while (accept(Tok::comma)) n.args.push_back(expr());
            const Token close = expect(Tok::rparen, "')'");
            const bool nary = kind == Kind::min || kind == Kind::max;
            if (!nary && n.args.size() != 1)
                throw ParseError(t.text + " takes exactly one argument", {t.span.start, close.span.end});
            n.span = {t.span.start, close.span.end};
            return n;
        }
        throw ParseError("unknown identifier '" + t.text + "'", t.span);
    }

    Node piece(const Token& head) {
        Node n;
        n.kind = Kind::piece;
        expect(Tok::lparen, "'(' after piece");
        for (;;) {
            const Token lead = expect(Tok::ident, "guard variable or 'else'");
            if (lead.text == "else") {
                expect(Tok::colon, "':'");
                n.args.push_back(expr());
                break;
            }
            if (!is_variable_name(lead.text))
                throw ParseError("unknown identifier '" + lead.text + "'", lead.span);
            bind_variable(lead);
            expect(Tok::le, "'<='");
            Node bound = expr();
            if (references_variable(bound))
                throw ParseError("piecewise guard must be constant", bound.span);
            const double c = eval_node(bound, 0.0);
            if (!n.guards.empty() && !(c > n.guards.back()))
                throw ParseError("piecewise guards must be strictly increasing", bound.span);
            n.guards.push_back(c);
            expect(Tok::colon, "':'");
            n.args.push_back(expr());
            expect(Tok::semicolon, "';' (a piecewise expression ends with an else branch)");
        }
        if (n.guards.empty()) throw ParseError("piecewise needs at least one guard", head.span);
        const Token close = expect(Tok::rparen, "')'");
        n.span = {head.span.start, close.span.end};
        return n;
    }

    std::string_view text_;
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    std::vector<std::string> allowed_;
    std::optional<std::string> chosen_;
};

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

int precedence(const Node& n) {
    switch (n.kind) {
        case Kind::add:
        case Kind::sub: return 1;
        case Kind::mul:
        case Kind::div: return 2;
        case Kind::neg: return 3;
        case Kind::pow: return 4;
        default: return 5;
    }
}

std::string number_text(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void render_node(const Node& n, const std::string& var, std::string& out);

void render_child(const Node& child, bool parens, const std::string& var, std::string& out) {
    if (parens) out += '(';
    render_node(child, var, out);
    if (parens) out += ')';
}

void render_node(const Node& n, const std::string& var, std::string& out) {
    const int prec = precedence(n);
    switch (n.kind) {
        case Kind::number: {
            // Negative literals never come out of the parser, but keep them safe.
            const bool neg = n.value < 0.0;
            if (neg) out += '(';
            out += number_text(n.value);
            if (neg) out += ')';
            return;
        }
        case Kind::euler: out += 'e'; return;
        case Kind::variable: out += var; return;
        case Kind::neg:
            out += '-';
            render_child(n.args[0], precedence(n.args[0]) <= prec, var, out);
            return;
        case Kind::add:
        case Kind::sub:
        case Kind::mul:
        case Kind::div: {
            static const char ops[] = {'+', '-', '*', '/'};
            const char op = ops[static_cast<int>(n.kind) - static_cast<int>(Kind::add)];
            render_child(n.args[0], precedence(n.args[0]) < prec, var, out);
            out += ' ';
            out += op;
            out += ' ';
            const bool left_assoc_guard = n.kind == Kind::sub || n.kind == Kind::div;
            const int rp = precedence(n.args[1]);
            render_child(n.args[1], rp < prec || (left_assoc_guard && rp == prec), var, out);
            return;
        }
        case Kind::pow:
            render_child(n.args[0], precedence(n.args[0]) <= prec, var, out);
            out += '^';
            render_child(n.args[1], precedence(n.args[1]) < prec, var, out);
            return;
        case Kind::exp:
        case Kind::ln:
        case Kind::sqrt:
        case Kind::min:
        case Kind::max: {
            static const char* names[] = {"exp", "ln", "sqrt", "min", "max"};
            out += names[static_cast<int>(n.kind) - static_cast<int>(Kind::exp)];
            out += '(';
            for (std::size_t i = 0; i < n.args.size(); ++i) {
                if (i) out += ", ";
                render_node(n.args[i], var, out);
            }
            out += ')';
            return;
        }
        case Kind::piece:
            out += "piece(";
            for (std::size_t i = 0; i < n.guards.size(); ++i) {
                out += var + " <= " + number_text(n.guards[i]) + " : ";
                render_node(n.args[i], var, out);
                out += " ; ";
            }
            out += "else : ";
            render_node(n.args.back(), var, out);
            out += ')';
            return;
    }
}

void collect_breakpoints(const Node& n, std::vector<double>& out) {
    out.insert(out.end(), n.guards.begin(), n.guards.end());
    for (const auto& c : n.args) collect_breakpoints(c, out);
}

double continuity_gap(const Node& n) {
    double gap = 0.0;
    for (const auto& c : n.args) gap = std::max(gap, continuity_gap(c));
    if (n.kind != Kind::piece) return gap;
    for (std::size_t i = 0; i < n.guards.size(); ++i) {
        const double c = n.guards[i];
        const double left = eval_node(n.args[i], c);
        const double right = eval_node(n.args[i + 1], c);
        gap = std::max(gap, std::abs(left - right));
    }
    return gap;
}

}  // namespace

Expr::Expr(std::shared_ptr<const Node> root, std::string variable, std::string source)
    : root_(std::move(root)), variable_(std::move(variable)), source_(std::move(source)) {}

Expr Expr::parse(std::string_view text) {
    Parser parser(text, {"p", "x"});
    auto root = std::make_shared<const Node>(parser.parse_all());
    return Expr(std::move(root), parser.variable(), std::string(text));
}

Expr Expr::parse(std::string_view text, std::string_view variable) {
    if (variable.empty() || variable == "e")
        throw ParseError("invalid variable name", {0, 0});
    Parser parser(text, {std::string(variable)});
    auto root = std::make_shared<const Node>(parser.parse_all());
    return Expr(std::move(root), std::string(variable), std::string(text));
}

double Expr::eval(double value) const { return eval_node<double>(*root_, value); }

std::optional<Expr> Expr::reflected() const {
    bool ok = true;
    Node r = reflect(*root_, ok);
    if (!ok) return std::nullopt;
    return Expr(std::make_shared<const Node>(std::move(r)), variable_, source_);
}

std::pair<double, double> Expr::eval_with_derivative(double value) const {
    const Dual r = eval_node<Dual>(*root_, Dual{value, 1.0});
    return {r.v, r.d};
}

std::string Expr::render() const {
    std::string out;
    render_node(*root_, variable_, out);
    return out;
}

std::vector<double> Expr::breakpoints() const {
    std::vector<double> out;
    collect_breakpoints(*root_, out);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

double piecewise_continuity_gap(const Expr& expr) { return continuity_gap(*expr.root_); }

}  // namespace storder
