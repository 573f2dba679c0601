#pragma once

// Expression trees over the jet variables {t, u, p, q, r}: parsing, printing,
// symbolic partial derivatives, and evaluation on doubles or Taylor series.

#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "error.hpp"
#include "jet.hpp"
#include "taylor.hpp"

namespace schwarz {

enum class Var : std::uint8_t { t, u, p, q, r };

inline constexpr std::array<Var, 5> kAllVars{Var::t, Var::u, Var::p, Var::q, Var::r};

inline char var_name(Var v) {
    constexpr std::array<char, 5> names{'t', 'u', 'p', 'q', 'r'};
    return names[static_cast<std::size_t>(v)];
}

inline std::optional<Var> var_from_name(std::string_view s) {
    if (s.size() != 1) return std::nullopt;
    switch (s[0]) {
        case 't': return Var::t;
        case 'u': return Var::u;
        case 'p': return Var::p;
        case 'q': return Var::q;
        case 'r': return Var::r;
        default: return std::nullopt;
    }
}

inline double jet_value(const Jet4& j, Var v) {
    switch (v) {
        case Var::t: return j.t;
        case Var::u: return j.u;
        case Var::p: return j.p;
        case Var::q: return j.q;
        case Var::r: return j.r;
    }
    return 0.0;
}

class UnknownIdentifierError : public ParseError {
public:
    using ParseError::ParseError;
};

enum class Op : std::uint8_t { Num, Var, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Tan, Exp, Ln };

/// Immutable expression. Copies share structure.
class Expr {
public:
    struct Node {
        Op op = Op::Num;
        double value = 0.0;   // Num
        Var var = Var::t;     // Var
        int exponent = 0;     // Pow
        std::shared_ptr<const Node> a;
        std::shared_ptr<const Node> b;
    };

    Expr() : Expr(number(0.0)) {}

    static Expr number(double v) {
        auto n = std::make_shared<Node>();
        n->op = Op::Num;
        n->value = v;
        return Expr(std::move(n));
    }

    static Expr variable(Var v) {
        auto n = std::make_shared<Node>();
        n->op = Op::Var;
        n->var = v;
        return Expr(std::move(n));
    }

    Op op() const noexcept { return node_->op; }
    bool is_number() const noexcept { return node_->op == Op::Num; }
    bool is_number(double v) const noexcept { return is_number() && node_->value == v; }
    double number_value() const noexcept { return node_->value; }
    Var var() const noexcept { return node_->var; }
    int exponent() const noexcept { return node_->exponent; }
    Expr lhs() const { return Expr(node_->a); }
    Expr rhs() const { return Expr(node_->b); }

    // Constant-folding constructors.
    friend Expr operator+(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a, const Expr& b);
    friend Expr operator*(const Expr& a, const Expr& b);
    friend Expr operator/(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a);
    friend Expr pow(const Expr& a, int n);
    friend Expr apply(Op fn, const Expr& a);

private:
    explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

    static Expr make(Op op, const Expr& a, const Expr* b = nullptr, int exponent = 0) {
        auto n = std::make_shared<Node>();
        n->op = op;
        n->a = a.node_;
        if (b) n->b = b->node_;
        n->exponent = exponent;
        return Expr(std::move(n));
    }

    std::shared_ptr<const Node> node_;
};

inline Expr operator+(const Expr& a, const Expr& b) {
    if (a.is_number() && b.is_number()) return Expr::number(a.number_value() + b.number_value());
    if (a.is_number(0.0)) return b;
    if (b.is_number(0.0)) return a;
    return Expr::make(Op::Add, a, &b);
}

inline Expr operator-(const Expr& a) {
    if (a.is_number()) return Expr::number(-a.number_value());
    if (a.op() == Op::Neg) return a.lhs();
    return Expr::make(Op::Neg, a);
}

inline Expr operator-(const Expr& a, const Expr& b) {
    if (a.is_number() && b.is_number()) return Expr::number(a.number_value() - b.number_value());
    if (b.is_number(0.0)) return a;
    if (a.is_number(0.0)) return -b;
    return Expr::make(Op::Sub, a, &b);
}

inline Expr operator*(const Expr& a, const Expr& b) {
    if (a.is_number() && b.is_number()) return Expr::number(a.number_value() * b.number_value());
    if (a.is_number(0.0) || b.is_number(0.0)) return Expr::number(0.0);
    if (a.is_number(1.0)) return b;
    if (b.is_number(1.0)) return a;
    if (a.is_number(-1.0)) return -b;
    if (b.is_number(-1.0)) return -a;
    return Expr::make(Op::Mul, a, &b);
}

inline Expr operator/(const Expr& a, const Expr& b) {
    if (b.is_number(0.0)) throw DomainError("division by literal zero");
    if (a.is_number() && b.is_number()) return Expr::number(a.number_value() / b.number_value());
    if (a.is_number(0.0)) return Expr::number(0.0);
    if (b.is_number(1.0)) return a;
    return Expr::make(Op::Div, a, &b);
}

inline Expr pow(const Expr& a, int n) {
    if (n == 0) return Expr::number(1.0);
    if (n == 1) return a;
    if (a.is_number()) {
        if (a.number_value() == 0.0 && n < 0) throw DomainError("division by literal zero");
        return Expr::number(std::pow(a.number_value(), n));
    }
    return Expr::make(Op::Pow, a, nullptr, n);
}

inline Expr apply(Op fn, const Expr& a) {
    if (a.is_number()) {
        const double x = a.number_value();
        switch (fn) {
            case Op::Sin: return Expr::number(std::sin(x));
            case Op::Cos: return Expr::number(std::cos(x));
            case Op::Exp: return Expr::number(std::exp(x));
            case Op::Tan:
                if (std::abs(std::cos(x)) >= kTanPoleTol) return Expr::number(std::tan(x));
                break;
            case Op::Ln:
                if (x > 0.0) return Expr::number(std::log(x));
                break;
            case Op::Neg: return Expr::number(-x);
            default: break;
        }
    }
    if (fn == Op::Neg) return -a;
    return Expr::make(fn, a);
}

inline Expr sin(const Expr& a) { return apply(Op::Sin, a); }
inline Expr cos(const Expr& a) { return apply(Op::Cos, a); }
inline Expr tan(const Expr& a) { return apply(Op::Tan, a); }
inline Expr exp(const Expr& a) { return apply(Op::Exp, a); }
inline Expr ln(const Expr& a) { return apply(Op::Ln, a); }

inline Expr operator+(const Expr& a, double b) { return a + Expr::number(b); }
inline Expr operator+(double a, const Expr& b) { return Expr::number(a) + b; }
inline Expr operator-(const Expr& a, double b) { return a - Expr::number(b); }
inline Expr operator-(double a, const Expr& b) { return Expr::number(a) - b; }
inline Expr operator*(const Expr& a, double b) { return a * Expr::number(b); }
inline Expr operator*(double a, const Expr& b) { return Expr::number(a) * b; }
inline Expr operator/(const Expr& a, double b) { return a / Expr::number(b); }
inline Expr operator/(double a, const Expr& b) { return Expr::number(a) / b; }

// ---------------------------------------------------------------------------
// Printing

namespace detail {

inline const char* func_name(Op op) {
    switch (op) {
        case Op::Sin: return "sin";
        case Op::Cos: return "cos";
        case Op::Tan: return "tan";
        case Op::Exp: return "exp";
        case Op::Ln: return "ln";
        default: return "?";
    }
}

inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Binding strength: 1 additive, 2 multiplicative, 3 unary minus, 4 power, 5 atom.
inline int precedence(const Expr& e) {
    switch (e.op()) {
        case Op::Add:
        case Op::Sub: return 1;
        case Op::Mul:
        case Op::Div: return 2;
        case Op::Neg: return 3;
        case Op::Pow: return 4;
        case Op::Num: return std::signbit(e.number_value()) ? 3 : 5;
        default: return 5;
    }
}

inline void print(const Expr& e, int min_prec, std::string& out) {
    const bool wrap = precedence(e) < min_prec;
    if (wrap) out += '(';
    switch (e.op()) {
        case Op::Num: out += format_number(e.number_value()); break;
        case Op::Var: out += var_name(e.var()); break;
        case Op::Add:
        case Op::Sub:
            print(e.lhs(), 1, out);
            out += e.op() == Op::Add ? " + " : " - ";
            print(e.rhs(), 2, out);
            break;
        case Op::Mul:
        case Op::Div:
            print(e.lhs(), 2, out);
            out += e.op() == Op::Mul ? "*" : "/";
            print(e.rhs(), 4, out);
            break;
        case Op::Neg:
            out += '-';
            print(e.lhs(), 3, out);
            break;
        case Op::Pow:
            print(e.lhs(), 5, out);
            out += '^';
            if (e.exponent() < 0) {
                out += "(" + std::to_string(e.exponent()) + ")";
            } else {
                out += std::to_string(e.exponent());
            }
            break;
        default:
            out += func_name(e.op());
            out += '(';
            print(e.lhs(), 0, out);
            out += ')';
            break;
    }
    if (wrap) out += ')';
}

}  // namespace detail

/// Text form accepted back by parse().
inline std::string to_string(const Expr& e) {
    std::string out;
    detail::print(e, 0, out);
    return out;
}

// ---------------------------------------------------------------------------
// Parsing
//
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := '-' factor | base ('^' integer)?
//   base   := number | ident | '(' expr ')' | func '(' expr ')'
//
// integer may be written signed inside parentheses: q^(-2).

namespace detail {

class Parser {
public:
    explicit Parser(std::string_view text) : s_(text) {}

    Expr parse_all() {
        Expr e = expr();
        skip_ws();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError("syntax error: " + msg, pos_); }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) {
            if (pos_ >= s_.size()) fail(std::string("expected '") + c + "' but input ended");
            fail(std::string("expected '") + c + "'");
        }
    }

    Expr expr() {
        Expr acc = term();
        for (;;) {
            if (accept('+')) {
                acc = acc + term();
            } else if (accept('-')) {
                acc = acc - term();
            } else {
                return acc;
            }
        }
    }

    Expr term() {
        Expr acc = factor();
        for (;;) {
            if (accept('*')) {
                acc = acc * factor();
            } else if (accept('/')) {
                const std::size_t at = pos_;
                Expr d = factor();
                if (d.is_number(0.0)) throw ParseError("division by literal zero", at);
                acc = acc / d;
            } else {
                return acc;
            }
        }
    }

    Expr factor() {
        if (accept('-')) return -factor();
        Expr b = base();
        if (accept('^')) return pow(b, integer_exponent());
        return b;
    }

    int integer_exponent() {
        skip_ws();
        const std::size_t start = pos_;
        const bool paren = accept('(');
        bool negative = false;
        if (paren) {
            if (accept('-')) {
                negative = true;
            } else {
                accept('+');
            }
        } else if (accept('-')) {
            negative = true;
        }
        skip_ws();
        const std::size_t digits_at = pos_;
        long value = 0;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
            value = value * 10 + (s_[pos_] - '0');
            if (value > 1'000'000) throw ParseError("exponent too large", digits_at);
            ++pos_;
        }
        const bool bad_tail = pos_ < s_.size() && (s_[pos_] == '.' || s_[pos_] == 'e' || s_[pos_] == 'E');
        if (pos_ == digits_at || bad_tail) throw ParseError("non-integer exponent", start);
        if (paren) {
            skip_ws();
            if (pos_ >= s_.size() || s_[pos_] != ')') throw ParseError("non-integer exponent", start);
            ++pos_;
        }
        return static_cast<int>(negative ? -value : value);
    }

    Expr base() {
        skip_ws();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::size_t start = pos_;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
            const std::string_view id = s_.substr(start, pos_ - start);
            if (auto v = var_from_name(id)) return Expr::variable(*v);
            std::optional<Op> fn;
            if (id == "sin") fn = Op::Sin;
            if (id == "cos") fn = Op::Cos;
            if (id == "tan") fn = Op::Tan;
            if (id == "exp") fn = Op::Exp;
            if (id == "ln") fn = Op::Ln;
            if (!fn) throw UnknownIdentifierError("unknown identifier '" + std::string(id) + "'", start);
            expect('(');
            Expr arg = expr();
            expect(')');
            return apply(*fn, arg);
        }
        if (accept('(')) {
            Expr e = expr();
            expect(')');
            return e;
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    Expr number() {
        const std::size_t start = pos_;
        auto digits = [&] {
            std::size_t n = 0;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
                ++pos_;
                ++n;
            }
            return n;
        };
        std::size_t n = digits();
        if (pos_ < s_.size() && s_[pos_] == '.') {
            ++pos_;
            n += digits();
        }
        if (n == 0) throw ParseError("syntax error: malformed number", start);
        if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
            std::size_t look = pos_ + 1;
            if (look < s_.size() && (s_[look] == '+' || s_[look] == '-')) ++look;
            if (look < s_.size() && std::isdigit(static_cast<unsigned char>(s_[look]))) {
                pos_ = look;
                digits();
            }
        }
        const std::string lit(s_.substr(start, pos_ - start));
        return Expr::number(std::strtod(lit.c_str(), nullptr));
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

}  // namespace detail

/// Parse a formula over t, u, p, q, r.
inline Expr parse(std::string_view text) { return detail::Parser(text).parse_all(); }

// ---------------------------------------------------------------------------
// Symbolic differentiation

/// Exact partial derivative with respect to `v`, constant-folded.
inline Expr differentiate(const Expr& e, Var v) {
    switch (e.op()) {
        case Op::Num: return Expr::number(0.0);
        case Op::Var: return Expr::number(e.var() == v ? 1.0 : 0.0);
        case Op::Add: return differentiate(e.lhs(), v) + differentiate(e.rhs(), v);
        case Op::Sub: return differentiate(e.lhs(), v) - differentiate(e.rhs(), v);
        case Op::Mul: {
            const Expr a = e.lhs(), b = e.rhs();
            return differentiate(a, v) * b + a * differentiate(b, v);
        }
        case Op::Div: {
            const Expr a = e.lhs(), b = e.rhs();
            const Expr da = differentiate(a, v), db = differentiate(b, v);
            if (db.is_number(0.0)) return da / b;
            return (da * b - a * db) / pow(b, 2);
        }
        case Op::Pow: {
            const int n = e.exponent();
            return static_cast<double>(n) * pow(e.lhs(), n - 1) * differentiate(e.lhs(), v);
        }
        case Op::Neg: return -differentiate(e.lhs(), v);
        case Op::Sin: return cos(e.lhs()) * differentiate(e.lhs(), v);
        case Op::Cos: return -(sin(e.lhs()) * differentiate(e.lhs(), v));
        case Op::Tan: return (1.0 + pow(e, 2)) * differentiate(e.lhs(), v);
        case Op::Exp: return e * differentiate(e.lhs(), v);
        case Op::Ln: return differentiate(e.lhs(), v) / e.lhs();
    }
    return Expr::number(0.0);
}

// ---------------------------------------------------------------------------
// Evaluation

namespace detail {

inline double checked_div(double a, double b) {
    if (b == 0.0) throw DomainError("division by zero");
    return a / b;
}
inline TaylorScalar checked_div(const TaylorScalar& a, const TaylorScalar& b) { return a / b; }

inline double checked_ln(double a) {
    if (!(a > 0.0)) throw DomainError("ln of non-positive value " + std::to_string(a));
    return std::log(a);
}
inline TaylorScalar checked_ln(const TaylorScalar& a) { return log(a); }

inline double checked_tan(double a) {
    if (std::abs(std::cos(a)) < kTanPoleTol) throw DomainError("tan at a pole");
    return std::tan(a);
}
inline TaylorScalar checked_tan(const TaylorScalar& a) { return tan(a); }

inline double int_pow(double a, int n) {
    if (n < 0 && a == 0.0) throw DomainError("division by zero");
    return std::pow(a, n);
}
inline TaylorScalar int_pow(const TaylorScalar& a, int n) { return pow(a, n); }

// Lookup(Var) -> T and Lift(double) -> T supply leaves.
template <class T, class Lookup, class Lift>
T evaluate(const Expr& e, const Lookup& lookup, const Lift& lift) {
    using std::cos;
    using std::exp;
    using std::sin;
    switch (e.op()) {
        case Op::Num: return lift(e.number_value());
        case Op::Var: return lookup(e.var());
        case Op::Add: return evaluate<T>(e.lhs(), lookup, lift) + evaluate<T>(e.rhs(), lookup, lift);
        case Op::Sub: return evaluate<T>(e.lhs(), lookup, lift) - evaluate<T>(e.rhs(), lookup, lift);
        case Op::Mul: return evaluate<T>(e.lhs(), lookup, lift) * evaluate<T>(e.rhs(), lookup, lift);
        case Op::Div: return checked_div(evaluate<T>(e.lhs(), lookup, lift), evaluate<T>(e.rhs(), lookup, lift));
        case Op::Pow: return int_pow(evaluate<T>(e.lhs(), lookup, lift), e.exponent());
        case Op::Neg: return -evaluate<T>(e.lhs(), lookup, lift);
        case Op::Sin: return sin(evaluate<T>(e.lhs(), lookup, lift));
        case Op::Cos: return cos(evaluate<T>(e.lhs(), lookup, lift));
        case Op::Tan: return checked_tan(evaluate<T>(e.lhs(), lookup, lift));
        case Op::Exp: return exp(evaluate<T>(e.lhs(), lookup, lift));
        case Op::Ln: return checked_ln(evaluate<T>(e.lhs(), lookup, lift));
    }
    return lift(0.0);
}

}  // namespace detail

/// Evaluate at a jet. Throws DomainError on division by zero, ln <= 0, tan poles.
inline double eval_scalar(const Expr& e, const Jet4& env) {
    return detail::evaluate<double>(
        e, [&](Var v) { return jet_value(env, v); }, [](double c) { return c; });
}

using TaylorEnv = std::map<Var, TaylorScalar>;

/// Compose `e` with series for its variables. Every series must share base point and order.
inline TaylorScalar taylor_eval(const Expr& e, const TaylorEnv& env) {
    if (env.empty()) throw InvalidArgument("taylor_eval needs at least one series in the environment");
    const TaylorScalar& first = env.begin()->second;
    for (const auto& [v, s] : env) first.check_compatible(s);
    const double base = first.base_point();
    const int order = first.order();
    return detail::evaluate<TaylorScalar>(
        e,
        [&](Var v) -> TaylorScalar {
            auto it = env.find(v);
            if (it == env.end()) throw DomainError(std::string("unbound variable '") + var_name(v) + "'");
            return it->second;
        },
        [&](double c) { return TaylorScalar(c, base, order); });
}

}  // namespace schwarz
