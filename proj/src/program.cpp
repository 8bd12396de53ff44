#include "dihedral/program.hpp"

#include <algorithm>
#include <cmath>

#include "dihedral/error.hpp"

namespace dihedral {

namespace {

inline double ipow(double x, int n) {
    unsigned k = static_cast<unsigned>(n < 0 ? -n : n);
    double r = 1.0, b = x;
    while (k) {
        if (k & 1u) r *= b;
        b *= b;
        k >>= 1u;
    }
    return n < 0 ? 1.0 / r : r;
}

constexpr std::size_t kChunk = 256;

}  // namespace

Program::Program(const Expr& e, const std::map<std::string, double>& params) {
    const Expr s = substitute(e, params);
    const auto missing = parameters_of(s);
    if (!missing.empty()) throw InputError("no value for parameter '" + *missing.begin() + "'");
    emit(s);
    int depth = 0;
    for (const Instr& in : code_) {
        switch (in.op) {
            case Code::push:
            case Code::load_u:
            case Code::load_v:
            case Code::load_mu: ++depth; break;
            case Code::add:
            case Code::sub:
            case Code::mul:
            case Code::div: --depth; break;
            default: break;
        }
        max_depth_ = std::max(max_depth_, depth);
    }
}

void Program::emit(const Expr& e) {
    const Node& n = e.node();
    switch (n.op) {
        case Op::constant: code_.push_back({Code::push, 0, n.value}); return;
        case Op::variable:
            code_.push_back({n.var == Var::u ? Code::load_u : n.var == Var::v ? Code::load_v : Code::load_mu});
            return;
        case Op::parameter: throw InputError("no value for parameter '" + n.name + "'");
        case Op::neg:
            emit(e.lhs());
            code_.push_back({Code::neg});
            return;
        case Op::pow: {
            const Expr ex = e.rhs();
            if (!ex.is_constant()) throw InputError("exponent does not reduce to a number: " + to_string(ex));
            const double p = ex.node().value;
            emit(e.lhs());
            if (std::floor(p) == p && std::abs(p) <= 64.0)
                code_.push_back({Code::powi, static_cast<int>(p), p});
            else
                code_.push_back({Code::powf, 0, p});
            return;
        }
        default: break;
    }
    emit(e.lhs());
    emit(e.rhs());
    Code c = Code::add;
    if (n.op == Op::sub) c = Code::sub;
    if (n.op == Op::mul) c = Code::mul;
    if (n.op == Op::div) c = Code::div;
    code_.push_back({c});
}

double Program::operator()(double u, double v, double mu) const {
    double local[32] = {};
    std::vector<double> heap;
    double* st = local;
    if (max_depth_ > 32) {
        heap.resize(static_cast<std::size_t>(max_depth_));
        st = heap.data();
    }
    int sp = 0;
    for (const Instr& in : code_) {
        switch (in.op) {
            case Code::push: st[sp++] = in.c; break;
            case Code::load_u: st[sp++] = u; break;
            case Code::load_v: st[sp++] = v; break;
            case Code::load_mu: st[sp++] = mu; break;
            case Code::add: --sp; st[sp - 1] += st[sp]; break;
            case Code::sub: --sp; st[sp - 1] -= st[sp]; break;
            case Code::mul: --sp; st[sp - 1] *= st[sp]; break;
            case Code::div:
                --sp;
                if (st[sp] == 0.0) throw EvalError("division by zero");
                st[sp - 1] /= st[sp];
                break;
            case Code::neg: st[sp - 1] = -st[sp - 1]; break;
            case Code::powi:
                if (st[sp - 1] == 0.0 && in.ipow < 0) throw EvalError("zero raised to a negative power");
                st[sp - 1] = ipow(st[sp - 1], in.ipow);
                break;
            case Code::powf:
                if (st[sp - 1] == 0.0 && in.c < 0.0) throw EvalError("zero raised to a negative power");
                if (st[sp - 1] < 0.0) throw EvalError("fractional power of a negative number");
                st[sp - 1] = std::pow(st[sp - 1], in.c);
                break;
        }
        if (!std::isfinite(st[sp - 1])) throw EvalError("non-finite value");
    }
    return st[0];
}

void Program::batch(std::span<const double> u, std::span<const double> v, double mu, std::span<double> out) const {
    const std::size_t total = out.size();
    thread_local std::vector<double> stack;
    stack.resize(static_cast<std::size_t>(std::max(max_depth_, 1)) * kChunk);
    for (std::size_t base = 0; base < total; base += kChunk) {
        const std::size_t w = std::min(kChunk, total - base);
        const double* uu = u.data() + base;
        const double* vv = v.data() + base;
        std::size_t sp = 0;  // number of occupied slots
        for (const Instr& in : code_) {
            double* slot = stack.data() + sp * kChunk;  // first free slot
            double* a = sp >= 2 ? slot - 2 * kChunk : slot;  // binary: left operand
            double* b = sp >= 1 ? slot - kChunk : slot;      // binary: right; unary: operand
            switch (in.op) {
                case Code::push: std::fill(slot, slot + w, in.c); ++sp; break;
                case Code::load_u: std::copy(uu, uu + w, slot); ++sp; break;
                case Code::load_v: std::copy(vv, vv + w, slot); ++sp; break;
                case Code::load_mu: std::fill(slot, slot + w, mu); ++sp; break;
                case Code::add: for (std::size_t i = 0; i < w; ++i) a[i] += b[i]; --sp; break;
                case Code::sub: for (std::size_t i = 0; i < w; ++i) a[i] -= b[i]; --sp; break;
                case Code::mul: for (std::size_t i = 0; i < w; ++i) a[i] *= b[i]; --sp; break;
                case Code::div: for (std::size_t i = 0; i < w; ++i) a[i] /= b[i]; --sp; break;
                case Code::neg: for (std::size_t i = 0; i < w; ++i) b[i] = -b[i]; break;
                case Code::powi:
                    if (in.ipow == 2) {
                        for (std::size_t i = 0; i < w; ++i) b[i] *= b[i];
                    } else {
                        for (std::size_t i = 0; i < w; ++i) b[i] = ipow(b[i], in.ipow);
                    }
                    break;
                case Code::powf: for (std::size_t i = 0; i < w; ++i) b[i] = std::pow(b[i], in.c); break;
            }
        }
        std::copy(stack.data(), stack.data() + w, out.data() + base);
    }
}

}  // namespace dihedral
