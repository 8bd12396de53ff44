#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "dihedral/expr.hpp"

namespace dihedral {

/// Expression compiled to stack bytecode with parameters frozen to numbers.
/// Evaluation is reentrant; a Program can be shared between threads.
class Program {
public:
    Program() = default;

    /// Every parameter of `e` must have a value in `params` (InputError otherwise).
    Program(const Expr& e, const std::map<std::string, double>& params);

    /// Checked scalar evaluation; throws EvalError like evaluate().
    double operator()(double u, double v, double mu) const;

    /// Unchecked evaluation of out[i] = e(u[i], v[i], mu). Non-finite values
    /// propagate as NaN/inf instead of throwing.
    void batch(std::span<const double> u, std::span<const double> v, double mu, std::span<double> out) const;

    bool is_constant() const { return code_.size() == 1 && code_[0].op == Code::push; }
    std::size_t size() const { return code_.size(); }

private:
    enum class Code : std::uint8_t { push, load_u, load_v, load_mu, add, sub, mul, div, neg, powi, powf };
    struct Instr {
        Code op;
        int ipow = 0;
        double c = 0.0;
    };

    void emit(const Expr& e);

    std::vector<Instr> code_;
    int max_depth_ = 0;
};

}  // namespace dihedral
