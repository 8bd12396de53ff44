#include "dihedral/expr.hpp"

#include <charconv>
#include <cmath>
#include <cctype>
#include <system_error>

#include "dihedral/error.hpp"

namespace dihedral {

const char* var_name(Var x) {
    switch (x) {
        case Var::u: return "u";
        case Var::v: return "v";
        case Var::mu: return "mu";
    }
    return "?";
}

namespace {

Expr make(Op op, Expr a, Expr b = Expr()) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->lhs = a.ptr();
    if (op != Op::neg) n->rhs = b.ptr();
    return Expr(std::move(n));
}

bool is_integer(double x) { return std::isfinite(x) && std::floor(x) == x; }

// Constant folding must not hide a runtime error, so only fold when the
// result is an ordinary finite number.
bool foldable(double r) { return std::isfinite(r); }

}  // namespace

Expr::Expr() : Expr(constant(0.0)) {}

Expr Expr::constant(double c) {
    auto n = std::make_shared<Node>();
    n->op = Op::constant;
    n->value = c == 0.0 ? 0.0 : c;  // no negative zero
    return Expr(std::move(n));
}

Expr Expr::variable(Var x) {
    auto n = std::make_shared<Node>();
    n->op = Op::variable;
    n->var = x;
    return Expr(std::move(n));
}

Expr Expr::parameter(std::string name) {
    auto n = std::make_shared<Node>();
    n->op = Op::parameter;
    n->name = std::move(name);
    return Expr(std::move(n));
}

Expr operator-(const Expr& a) {
    if (a.is_constant()) return Expr::constant(-a.node().value);
    if (a.op() == Op::neg) return a.lhs();
    return make(Op::neg, a);
}

Expr operator+(const Expr& a, const Expr& b) {
    if (a.is_constant() && b.is_constant()) {
        const double r = a.node().value + b.node().value;
        if (foldable(r)) return Expr::constant(r);
    }
    if (a.is_constant(0.0)) return b;
    if (b.is_constant(0.0)) return a;
    if (b.is_constant() && b.node().value < 0.0) return a - Expr::constant(-b.node().value);
    if (b.op() == Op::neg) return a - b.lhs();
    return make(Op::add, a, b);
}

Expr operator-(const Expr& a, const Expr& b) {
    if (a.is_constant() && b.is_constant()) {
        const double r = a.node().value - b.node().value;
        if (foldable(r)) return Expr::constant(r);
    }
    if (b.is_constant(0.0)) return a;
    if (a.is_constant(0.0)) return -b;
    if (b.is_constant() && b.node().value < 0.0) return a + Expr::constant(-b.node().value);
    if (b.op() == Op::neg) return a + b.lhs();
    return make(Op::sub, a, b);
}

Expr operator*(const Expr& a, const Expr& b) {
    if (a.is_constant() && b.is_constant()) {
        const double r = a.node().value * b.node().value;
        if (foldable(r)) return Expr::constant(r);
    }
    if (a.is_constant(0.0) || b.is_constant(0.0)) return Expr::constant(0.0);
    if (a.is_constant(1.0)) return b;
    if (b.is_constant(1.0)) return a;
    if (a.is_constant(-1.0)) return -b;
    if (b.is_constant(-1.0)) return -a;
    return make(Op::mul, a, b);
}

Expr operator/(const Expr& a, const Expr& b) {
    if (a.is_constant() && b.is_constant() && b.node().value != 0.0) {
        const double r = a.node().value / b.node().value;
        if (foldable(r)) return Expr::constant(r);
    }
    if (a.is_constant(0.0)) return Expr::constant(0.0);
    if (b.is_constant(1.0)) return a;
    if (b.is_constant(-1.0)) return -a;
    return make(Op::div, a, b);
}

Expr pow(const Expr& base, const Expr& exponent) {
    if (base.is_constant() && exponent.is_constant()) {
        const double x = base.node().value, p = exponent.node().value;
        if (!(x == 0.0 && p < 0.0) && !(x < 0.0 && !is_integer(p))) {
            const double r = std::pow(x, p);
            if (foldable(r)) return Expr::constant(r);
        }
    }
    if (exponent.is_constant(0.0)) return Expr::constant(1.0);
    if (exponent.is_constant(1.0)) return base;
    if (base.is_constant(1.0)) return Expr::constant(1.0);
    return make(Op::pow, base, exponent);
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser {
public:
    Parser(std::string_view text, const std::set<std::string>& params) : s_(text), params_(params) {}

    Expr run() {
        skip();
        if (pos_ >= s_.size()) throw ParseError("empty expression", pos_);
        Expr e = sum();
        skip();
        if (pos_ < s_.size()) throw ParseError(std::string("unexpected '") + s_[pos_] + "'", pos_);
        return e;
    }

private:
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Expr sum() {
        Expr e = product();
        for (;;) {
            if (accept('+')) e = e + product();
            else if (accept('-')) e = e - product();
            else return e;
        }
    }

    Expr product() {
        Expr e = unary();
        for (;;) {
            if (accept('*')) e = e * unary();
            else if (accept('/')) e = e / unary();
            else return e;
        }
    }

    Expr unary() {
        if (accept('-')) return -unary();
        return power();
    }

    Expr power() {
        Expr base = primary();
        skip();
        const std::size_t at = pos_;
        if (accept('^')) {
            Expr ex = unary();
            if (depends_on(ex, Var::u) || depends_on(ex, Var::v) || depends_on(ex, Var::mu))
                throw ParseError("exponent may not depend on u, v or mu", at);
            return pow(base, ex);
        }
        return base;
    }

    Expr primary() {
        skip();
        if (pos_ >= s_.size()) throw ParseError("unexpected end of expression", pos_);
        const char c = s_[pos_];
        if (c == '(') {
            const std::size_t open = pos_++;
            Expr e = sum();
            if (!accept(')')) {
                skip();
                throw ParseError("missing ')' to match '(' at position " + std::to_string(open), pos_);
            }
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        throw ParseError(std::string("unexpected '") + c + "'", pos_);
    }

    Expr number() {
        const std::size_t start = pos_;
        auto digits = [&] {
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        };
        digits();
        if (pos_ < s_.size() && s_[pos_] == '.') {
            ++pos_;
            digits();
        }
        if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
            std::size_t q = pos_ + 1;
            if (q < s_.size() && (s_[q] == '+' || s_[q] == '-')) ++q;
            if (q < s_.size() && std::isdigit(static_cast<unsigned char>(s_[q]))) {
                pos_ = q;
                digits();
            }
        }
        std::string_view tok = s_.substr(start, pos_ - start);
        if (tok == ".") throw ParseError("malformed number", start);
        // from_chars does not take a leading '+' in the exponent on every libstdc++.
        std::string buf;
        buf.reserve(tok.size());
        for (std::size_t i = 0; i < tok.size(); ++i)
            if (!(tok[i] == '+' && i > 0 && (tok[i - 1] == 'e' || tok[i - 1] == 'E'))) buf.push_back(tok[i]);
        double x = 0.0;
        auto [p, ec] = std::from_chars(buf.data(), buf.data() + buf.size(), x);
        if (ec != std::errc() || p != buf.data() + buf.size()) throw ParseError("malformed number", start);
        return Expr::constant(x);
    }

    Expr identifier() {
        const std::size_t start = pos_;
        while (pos_ < s_.size() &&
               (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
            ++pos_;
        std::string id(s_.substr(start, pos_ - start));
        if (id == "u") return Expr::variable(Var::u);
        if (id == "v") return Expr::variable(Var::v);
        if (id == "mu") return Expr::variable(Var::mu);
        if (!params_.count(id)) throw ParseError("undeclared identifier '" + id + "'", start);
        return Expr::parameter(std::move(id));
    }

    std::string_view s_;
    const std::set<std::string>& params_;
    std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view text, const std::set<std::string>& params) {
    return Parser(text, params).run();
}

// ---------------------------------------------------------------------------

Expr substitute(const Expr& e, Var x, const Expr& replacement) {
    const Node& n = e.node();
    switch (n.op) {
        case Op::constant:
        case Op::parameter: return e;
        case Op::variable: return n.var == x ? replacement : e;
        case Op::neg: return -substitute(e.lhs(), x, replacement);
        case Op::add: return substitute(e.lhs(), x, replacement) + substitute(e.rhs(), x, replacement);
        case Op::sub: return substitute(e.lhs(), x, replacement) - substitute(e.rhs(), x, replacement);
        case Op::mul: return substitute(e.lhs(), x, replacement) * substitute(e.rhs(), x, replacement);
        case Op::div: return substitute(e.lhs(), x, replacement) / substitute(e.rhs(), x, replacement);
        case Op::pow: return pow(substitute(e.lhs(), x, replacement), substitute(e.rhs(), x, replacement));
    }
    return e;
}

bool depends_on(const Expr& e, Var x) {
    const Node& n = e.node();
    switch (n.op) {
        case Op::constant:
        case Op::parameter: return false;
        case Op::variable: return n.var == x;
        case Op::neg: return depends_on(e.lhs(), x);
        default: return depends_on(e.lhs(), x) || depends_on(e.rhs(), x);
    }
}

namespace {
void collect_params(const Expr& e, std::set<std::string>& out) {
    const Node& n = e.node();
    if (n.op == Op::parameter) out.insert(n.name);
    if (n.lhs) collect_params(e.lhs(), out);
    if (n.rhs) collect_params(e.rhs(), out);
}
}  // namespace

std::set<std::string> parameters_of(const Expr& e) {
    std::set<std::string> out;
    collect_params(e, out);
    return out;
}

Expr differentiate(const Expr& e, Var x) {
    const Node& n = e.node();
    switch (n.op) {
        case Op::constant:
        case Op::parameter: return Expr::constant(0.0);
        case Op::variable: return Expr::constant(n.var == x ? 1.0 : 0.0);
        case Op::neg: return -differentiate(e.lhs(), x);
        case Op::add: return differentiate(e.lhs(), x) + differentiate(e.rhs(), x);
        case Op::sub: return differentiate(e.lhs(), x) - differentiate(e.rhs(), x);
        case Op::mul: {
            const Expr a = e.lhs(), b = e.rhs();
            return differentiate(a, x) * b + a * differentiate(b, x);
        }
        case Op::div: {
            const Expr a = e.lhs(), b = e.rhs();
            const Expr da = differentiate(a, x), db = differentiate(b, x);
            if (db.is_constant(0.0)) return da / b;
            return (da * b - a * db) / pow(b, Expr::constant(2.0));
        }
        case Op::pow: {
            const Expr a = e.lhs(), c = e.rhs();
            if (depends_on(c, Var::u) || depends_on(c, Var::v) || depends_on(c, Var::mu))
                throw InputError("cannot differentiate a power whose exponent depends on u, v or mu");
            return c * pow(a, c - Expr::constant(1.0)) * differentiate(a, x);
        }
    }
    return Expr::constant(0.0);
}

Expr differentiate(const Expr& e, int du, int dv, int dmu) {
    Expr r = e;
    for (int i = 0; i < du; ++i) r = differentiate(r, Var::u);
    for (int i = 0; i < dv; ++i) r = differentiate(r, Var::v);
    for (int i = 0; i < dmu; ++i) r = differentiate(r, Var::mu);
    return r;
}

double evaluate(const Expr& e, const Bindings& b) {
    const Node& n = e.node();
    double r = 0.0;
    switch (n.op) {
        case Op::constant: r = n.value; break;
        case Op::variable: r = n.var == Var::u ? b.u : n.var == Var::v ? b.v : b.mu; break;
        case Op::parameter: {
            auto it = b.params.find(n.name);
            if (it == b.params.end()) throw EvalError("unbound parameter '" + n.name + "'");
            r = it->second;
            break;
        }
        case Op::neg: r = -evaluate(e.lhs(), b); break;
        case Op::add: r = evaluate(e.lhs(), b) + evaluate(e.rhs(), b); break;
        case Op::sub: r = evaluate(e.lhs(), b) - evaluate(e.rhs(), b); break;
        case Op::mul: r = evaluate(e.lhs(), b) * evaluate(e.rhs(), b); break;
        case Op::div: {
            const double num = evaluate(e.lhs(), b), den = evaluate(e.rhs(), b);
            if (den == 0.0) throw EvalError("division by zero");
            r = num / den;
            break;
        }
        case Op::pow: {
            const double x = evaluate(e.lhs(), b), p = evaluate(e.rhs(), b);
            if (x == 0.0 && p < 0.0) throw EvalError("zero raised to a negative power");
            if (x < 0.0 && !is_integer(p)) throw EvalError("fractional power of a negative number");
            r = std::pow(x, p);
            break;
        }
    }
    if (!std::isfinite(r)) throw EvalError("non-finite value");
    return r;
}

Expr substitute(const Expr& e, const std::map<std::string, double>& values) {
    const Node& n = e.node();
    switch (n.op) {
        case Op::constant:
        case Op::variable: return e;
        case Op::parameter: {
            auto it = values.find(n.name);
            return it == values.end() ? e : Expr::constant(it->second);
        }
        case Op::neg: return -substitute(e.lhs(), values);
        case Op::add: return substitute(e.lhs(), values) + substitute(e.rhs(), values);
        case Op::sub: return substitute(e.lhs(), values) - substitute(e.rhs(), values);
        case Op::mul: return substitute(e.lhs(), values) * substitute(e.rhs(), values);
        case Op::div: return substitute(e.lhs(), values) / substitute(e.rhs(), values);
        case Op::pow: return pow(substitute(e.lhs(), values), substitute(e.rhs(), values));
    }
    return e;
}

// ---------------------------------------------------------------------------
// Printer

std::string format_double(double x) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
    (void)ec;
    return std::string(buf, p);
}

namespace {

// 1 sum, 2 product, 3 unary, 4 power, 5 primary
int level(const Node& n) {
    switch (n.op) {
        case Op::constant: return n.value < 0.0 ? 3 : 5;
        case Op::variable:
        case Op::parameter: return 5;
        case Op::add:
        case Op::sub: return 1;
        case Op::mul:
        case Op::div: return 2;
        case Op::neg: return 3;
        case Op::pow: return 4;
    }
    return 5;
}

void print(const Expr& e, int need, std::string& out) {
    const Node& n = e.node();
    const bool paren = level(n) < need;
    if (paren) out += '(';
    switch (n.op) {
        case Op::constant: out += format_double(n.value); break;
        case Op::variable: out += var_name(n.var); break;
        case Op::parameter: out += n.name; break;
        case Op::neg:
            out += '-';
            print(e.lhs(), 3, out);
            break;
        case Op::add:
        case Op::sub:
            print(e.lhs(), 1, out);
            out += n.op == Op::add ? " + " : " - ";
            print(e.rhs(), 2, out);
            break;
        case Op::mul:
        case Op::div:
            print(e.lhs(), 2, out);
            out += n.op == Op::mul ? '*' : '/';
            print(e.rhs(), 3, out);
            break;
        case Op::pow:
            print(e.lhs(), 5, out);
            out += '^';
            print(e.rhs(), 3, out);
            break;
    }
    if (paren) out += ')';
}

}  // namespace

std::string to_string(const Expr& e) {
    std::string out;
    print(e, 0, out);
    return out;
}

}  // namespace dihedral
