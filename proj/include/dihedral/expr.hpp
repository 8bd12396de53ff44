#pragma once

// Symbolic reaction terms: a small expression language over u, v, mu and
// named parameters, with exact differentiation.

#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace dihedral {

enum class Var { u = 0, v = 1, mu = 2 };

const char* var_name(Var x);

enum class Op { constant, variable, parameter, add, sub, mul, div, pow, neg };

class Expr;

struct Node {
    Op op = Op::constant;
    double value = 0.0;     // constant
    Var var = Var::u;       // variable
    std::string name;       // parameter
    std::shared_ptr<const Node> lhs, rhs;  // rhs unused for neg
};

/// Immutable expression handle. Copies share the tree.
class Expr {
public:
    Expr();  // the constant 0
    explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

    static Expr constant(double c);
    static Expr variable(Var x);
    static Expr parameter(std::string name);

    const Node& node() const { return *node_; }
    const std::shared_ptr<const Node>& ptr() const { return node_; }
    Op op() const { return node_->op; }
    Expr lhs() const { return Expr(node_->lhs); }
    Expr rhs() const { return Expr(node_->rhs); }

    bool is_constant() const { return node_->op == Op::constant; }
    bool is_constant(double c) const { return is_constant() && node_->value == c; }

private:
    std::shared_ptr<const Node> node_;
};

// Smart constructors. They fold constants and drop neutral elements; nothing more.
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& base, const Expr& exponent);

/// Parses `text`. Identifiers other than u, v, mu must appear in `params`.
/// Throws ParseError with the character offset on malformed input.
Expr parse(std::string_view text, const std::set<std::string>& params);

Expr differentiate(const Expr& e, Var x);

/// Repeated differentiation: du times in u, dv in v, dmu in mu.
Expr differentiate(const Expr& e, int du, int dv, int dmu);

struct Bindings {
    double u = 0.0, v = 0.0, mu = 0.0;
    std::map<std::string, double> params;
};

/// Checked evaluation. Throws EvalError on division by zero, 0 to a negative
/// power, a fractional power of a negative number, or an unbound parameter.
double evaluate(const Expr& e, const Bindings& b);

/// Replaces named parameters by constants (and re-simplifies).
Expr substitute(const Expr& e, const std::map<std::string, double>& values);

/// Replaces every occurrence of variable x by `replacement`.
Expr substitute(const Expr& e, Var x, const Expr& replacement);

bool depends_on(const Expr& e, Var x);
std::set<std::string> parameters_of(const Expr& e);

/// Prints in the grammar accepted by parse(); parse(to_string(e)) prints identically.
std::string to_string(const Expr& e);

/// Shortest decimal text that reads back to exactly `x`.
std::string format_double(double x);

}  // namespace dihedral
