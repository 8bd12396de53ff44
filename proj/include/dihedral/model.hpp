#pragma once

#include <array>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "dihedral/expr.hpp"
#include "dihedral/linalg2.hpp"
#include "dihedral/program.hpp"

namespace dihedral {

/// Compiled partial derivatives of the effective reactions (f, g):
/// d^(i+j+l) / du^i dv^j dmu^l with i + j <= 3 and l <= 2.
class ReactionJet {
public:
    static constexpr int kMaxUV = 3;
    static constexpr int kMaxMu = 2;

    ReactionJet(const Expr& f, const Expr& g, const std::map<std::string, double>& params);

    /// comp 0 is f, 1 is g. Throws EvalError naming the partial on failure.
    double d(int comp, int i, int j, int l, double u, double v, double mu) const;

    Vec2 F(double u, double v, double mu) const;
    /// [[f_u, f_v], [g_u, g_v]]
    Mat2 J(double u, double v, double mu) const;
    Vec2 F_mu(double u, double v, double mu) const;

    static std::string partial_name(int comp, int i, int j, int l);

private:
    static int index(int i, int j, int l) { return (i * (kMaxUV + 1) + j) * (kMaxMu + 1) + l; }
    std::array<std::vector<Program>, 2> prog_;
};

/// Partial derivatives evaluated at one point.
struct PartialTensor {
    int max_order = 0;
    // value[comp][i][j][l]; entries outside the requested orders are zero
    double value[2][4][4][3] = {};

    double operator()(int comp, int i, int j, int l = 0) const { return value[comp][i][j][l]; }
};

/// Two-component model u_t = Lap u - fhat, v_t = D_v Lap(v - beta u) - ghat.
class ModelSpec {
public:
    ModelSpec(std::string name, Expr fhat, Expr ghat, double D_v, double beta,
              std::map<std::string, double> params);

    const std::string& name() const { return name_; }
    const Expr& fhat() const { return fhat_; }
    const Expr& ghat() const { return ghat_; }
    double D_v() const { return D_v_; }
    double beta() const { return beta_; }
    const std::map<std::string, double>& params() const { return params_; }

    /// Effective steady-state reactions f = fhat, g = ghat / D_v + beta fhat.
    const Expr& f() const { return f_; }
    const Expr& g() const { return g_; }

    const ReactionJet& jet() const { return *jet_; }

    /// Returns a copy with one parameter changed. "D_v"/"delta_v" and "beta"
    /// address the diffusion data; anything else must be an existing parameter.
    ModelSpec with(const std::string& key, double value) const;
    double get(const std::string& key) const;

    /// Canonical text for manifests and reports.
    std::string describe() const;

private:
    std::string name_;
    Expr fhat_, ghat_, f_, g_;
    double D_v_, beta_;
    std::map<std::string, double> params_;
    std::shared_ptr<const ReactionJet> jet_;
};

/// Names accepted by builtin_model().
const std::vector<std::string>& builtin_names();

/// Built-in vegetation models with their default parameters.
ModelSpec builtin_model(const std::string& name, const std::map<std::string, double>& overrides = {});

std::pair<Expr, Expr> effective_reaction(const ModelSpec& model);

PartialTensor partial_tensor(const ModelSpec& model, double u, double v, double mu, int max_order);

}  // namespace dihedral
