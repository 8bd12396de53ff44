#include "dihedral/model.hpp"

#include <cmath>
#include <sstream>

#include "dihedral/error.hpp"

namespace dihedral {

ReactionJet::ReactionJet(const Expr& f, const Expr& g, const std::map<std::string, double>& params) {
    const Expr comps[2] = {f, g};
    for (int c = 0; c < 2; ++c) {
        prog_[c].resize(static_cast<std::size_t>((kMaxUV + 1) * (kMaxUV + 1) * (kMaxMu + 1)));
        for (int l = 0; l <= kMaxMu; ++l) {
            Expr dl = differentiate(comps[c], 0, 0, l);
            Expr di = dl;
            for (int i = 0; i <= kMaxUV; ++i) {
                Expr dij = di;
                for (int j = 0; i + j <= kMaxUV; ++j) {
                    prog_[c][static_cast<std::size_t>(index(i, j, l))] = Program(dij, params);
                    dij = differentiate(dij, Var::v);
                }
                di = differentiate(di, Var::u);
            }
        }
    }
}

std::string ReactionJet::partial_name(int comp, int i, int j, int l) {
    std::string s = comp == 0 ? "f" : "g";
    if (i + j + l == 0) return s;
    s += '_';
    s.append(static_cast<std::size_t>(i), 'u');
    s.append(static_cast<std::size_t>(j), 'v');
    for (int k = 0; k < l; ++k) s += "mu";
    return s;
}

double ReactionJet::d(int comp, int i, int j, int l, double u, double v, double mu) const {
    if (i < 0 || j < 0 || l < 0 || i + j > kMaxUV || l > kMaxMu)
        throw InputError("partial derivative order out of range");
    try {
        return prog_[comp][static_cast<std::size_t>(index(i, j, l))](u, v, mu);
    } catch (const EvalError& e) {
        throw EvalError(partial_name(comp, i, j, l) + ": " + e.what());
    }
}

Vec2 ReactionJet::F(double u, double v, double mu) const { return {d(0, 0, 0, 0, u, v, mu), d(1, 0, 0, 0, u, v, mu)}; }

Mat2 ReactionJet::J(double u, double v, double mu) const {
    return {d(0, 1, 0, 0, u, v, mu), d(0, 0, 1, 0, u, v, mu), d(1, 1, 0, 0, u, v, mu), d(1, 0, 1, 0, u, v, mu)};
}

Vec2 ReactionJet::F_mu(double u, double v, double mu) const {
    return {d(0, 0, 0, 1, u, v, mu), d(1, 0, 0, 1, u, v, mu)};
}

// ---------------------------------------------------------------------------

ModelSpec::ModelSpec(std::string name, Expr fhat, Expr ghat, double D_v, double beta,
                     std::map<std::string, double> params)
    : name_(std::move(name)), fhat_(std::move(fhat)), ghat_(std::move(ghat)), D_v_(D_v), beta_(beta),
      params_(std::move(params)) {
    if (!(D_v_ > 0.0) || !std::isfinite(D_v_)) throw InputError("D_v must be positive and finite");
    if (!(beta_ >= 0.0) || !std::isfinite(beta_)) throw InputError("beta must be finite and non-negative");
    for (const auto& [k, val] : params_) {
        if (!std::isfinite(val)) throw InputError("parameter '" + k + "' is not finite");
        if (k == "u" || k == "v" || k == "mu") throw InputError("'" + k + "' is reserved");
    }
    for (const Expr* e : {&fhat_, &ghat_})
        for (const auto& p : parameters_of(*e))
            if (!params_.count(p)) throw InputError("expression uses undeclared parameter '" + p + "'");
    f_ = fhat_;
    g_ = ghat_ / Expr::constant(D_v_);
    if (beta_ != 0.0) g_ = g_ + Expr::constant(beta_) * fhat_;
    jet_ = std::make_shared<const ReactionJet>(f_, g_, params_);
}

ModelSpec ModelSpec::with(const std::string& key, double value) const {
    if (key == "D_v" || key == "delta_v") return ModelSpec(name_, fhat_, ghat_, value, beta_, params_);
    if (key == "beta") return ModelSpec(name_, fhat_, ghat_, D_v_, value, params_);
    if (!params_.count(key)) throw InputError("model '" + name_ + "' has no parameter '" + key + "'");
    auto p = params_;
    p[key] = value;
    return ModelSpec(name_, fhat_, ghat_, D_v_, beta_, std::move(p));
}

double ModelSpec::get(const std::string& key) const {
    if (key == "D_v" || key == "delta_v") return D_v_;
    if (key == "beta") return beta_;
    auto it = params_.find(key);
    if (it == params_.end()) throw InputError("model '" + name_ + "' has no parameter '" + key + "'");
    return it->second;
}

std::string ModelSpec::describe() const {
    std::ostringstream os;
    os << "name = " << name_ << "\n"
       << "fhat = \"" << to_string(fhat_) << "\"\n"
       << "ghat = \"" << to_string(ghat_) << "\"\n"
       << "D_v = " << format_double(D_v_) << "\n"
       << "beta = " << format_double(beta_) << "\n";
    for (const auto& [k, val] : params_) os << "param " << k << " = " << format_double(val) << "\n";
    return os.str();
}

// ---------------------------------------------------------------------------

namespace {

struct Builtin {
    const char* name;
    const char* fhat;
    const char* ghat;
    double D_v;
    double beta;
    std::map<std::string, double> params;
};

const std::vector<Builtin>& builtins() {
    static const std::vector<Builtin> table = {
        {"kgs", "-v*u^2 + m*u", "-mu + v + v*u^2", 7.2, 0.0, {{"m", 0.5}}},
        {"logistic_klausmeier", "-(1 - b*u)*v*u^2 + m*u", "-mu + v + v*u^2", 182.5, 0.0, {{"b", 1.0}, {"m", 0.45}}},
        {"nfc_gilad", "-Lambda*v*u*(1 - u)*(1 + eta*u)^2 + u", "-mu + nu*(1 - rho*u)*v + Lambda*v*u*(1 + eta*u)^2",
         125.0, 0.0,
         {{"Lambda", 16.0 / 35.0}, {"eta", 14.0 / 5.0}, {"nu", 10.0 / 7.0}, {"rho", 7.0 / 10.0}}},
        {"von_hardenberg", "-gamma*v/(1 + sigma*v)*u + u^2 + nu*u", "-mu + (1 - rho*u)*v + u*v^2", 100.0, 3.0,
         {{"gamma", 1.6}, {"sigma", 1.6}, {"nu", 0.2}, {"rho", 1.5}}},
    };
    return table;
}

std::set<std::string> keys(const std::map<std::string, double>& m) {
    std::set<std::string> s;
    for (const auto& kv : m) s.insert(kv.first);
    return s;
}

}  // namespace

const std::vector<std::string>& builtin_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& b : builtins()) n.emplace_back(b.name);
        return n;
    }();
    return names;
}

ModelSpec builtin_model(const std::string& name, const std::map<std::string, double>& overrides) {
    for (const auto& b : builtins()) {
        if (name != b.name) continue;
        const auto declared = keys(b.params);
        ModelSpec m(b.name, parse(b.fhat, declared), parse(b.ghat, declared), b.D_v, b.beta, b.params);
        for (const auto& [k, val] : overrides) m = m.with(k, val);
        return m;
    }
    std::string known;
    for (const auto& n : builtin_names()) known += (known.empty() ? "" : ", ") + n;
    throw InputError("unknown model '" + name + "' (known: " + known + ")");
}

std::pair<Expr, Expr> effective_reaction(const ModelSpec& model) { return {model.f(), model.g()}; }

PartialTensor partial_tensor(const ModelSpec& model, double u, double v, double mu, int max_order) {
    if (max_order < 1 || max_order > 3) throw InputError("max_order must be 1, 2 or 3");
    PartialTensor t;
    t.max_order = max_order;
    const ReactionJet& jet = model.jet();
    for (int c = 0; c < 2; ++c)
        for (int i = 0; i <= max_order; ++i)
            for (int j = 0; i + j <= max_order; ++j)
                for (int l = 0; l <= ReactionJet::kMaxMu; ++l) t.value[c][i][j][l] = jet.d(c, i, j, l, u, v, mu);
    return t;
}

}  // namespace dihedral
