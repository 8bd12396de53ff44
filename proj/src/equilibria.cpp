#include "dihedral/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dihedral/error.hpp"

namespace dihedral {

namespace {

double residual_at(const ReactionJet& jet, double u, double v, double mu) {
    try {
        return norm_inf(jet.F(u, v, mu));
    } catch (const EvalError&) {
        return std::numeric_limits<double>::infinity();
    }
}

}  // namespace

std::optional<SteadyState> solve_steady(const ModelSpec& model, double mu, Vec2 x, int max_iter) {
    const ReactionJet& jet = model.jet();
    double r = residual_at(jet, x[0], x[1], mu);
    if (!std::isfinite(r)) return std::nullopt;
    int polish = 0;
    for (int it = 0; it < max_iter; ++it) {
        if (r < kSteadyTol && polish >= 3) break;
        if (r < kSteadyTol) ++polish;
        Vec2 F;
        Mat2 J;
        try {
            F = jet.F(x[0], x[1], mu);
            J = jet.J(x[0], x[1], mu);
        } catch (const EvalError&) {
            return std::nullopt;
        }
        const double det = J.det();
        if (det == 0.0 || !std::isfinite(det)) break;
        const Vec2 dx = J.solve(F);
        double t = 1.0;
        bool moved = false;
        for (int h = 0; h < 30; ++h, t *= 0.5) {
            const Vec2 y = x - t * dx;
            const double ry = residual_at(jet, y[0], y[1], mu);
            if (ry < r || (r < kSteadyTol && ry <= r)) {
                x = y;
                r = ry;
                moved = true;
                break;
            }
        }
        if (!moved) break;  // stagnated
        if (r < kSteadyTol && norm_inf(t * dx) <= 4e-16 * std::max(1.0, norm_inf(x))) break;
    }
    if (!(r < kSteadyTol) || !std::isfinite(x[0]) || !std::isfinite(x[1])) return std::nullopt;
    return SteadyState{x[0], x[1], mu, r};
}

std::vector<Vec2> lattice_seeds(const SteadyOptions& opt) {
    std::vector<Vec2> seeds;
    const int n = std::max(opt.lattice, 2);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            seeds.push_back({opt.u_max * i / (n - 1), opt.v_max * j / (n - 1)});
    return seeds;
}

SteadySearch find_steady_states(const ModelSpec& model, double mu, const std::vector<Vec2>& seeds,
                                const SteadyOptions& opt) {
    if (!std::isfinite(mu)) throw InputError("mu must be finite");
    const std::vector<Vec2> lattice = seeds.empty() ? lattice_seeds(opt) : std::vector<Vec2>{};
    const std::vector<Vec2>& use = seeds.empty() ? lattice : seeds;
    SteadySearch out;
    for (const Vec2& s : use) {
        auto st = solve_steady(model, mu, s);
        if (!st) {
            ++out.failed_seeds;
            continue;
        }
        if (opt.reject_negative && (st->u < -1e-12 || st->v < -1e-12)) continue;
        bool dup = false;
        for (auto& o : out.states) {
            if (std::hypot(o.u - st->u, o.v - st->v) <= opt.dedup_distance) {
                dup = true;
                break;
            }
            // Near a double root Newton only pins the state to about sqrt(residual);
            // two such copies are indistinguishable if the midpoint is also a root.
            const double mu_ = 0.5 * (o.u + st->u), mv = 0.5 * (o.v + st->v);
            const double rm = residual_at(model.jet(), mu_, mv, mu);
            if (rm < kSteadyTol && std::hypot(o.u - st->u, o.v - st->v) < 1e-3 * std::max(1.0, std::hypot(mu_, mv))) {
                o.u = mu_;
                o.v = mv;
                o.residual = rm;
                dup = true;
                break;
            }
        }
        if (!dup) out.states.push_back(*st);
    }
    std::sort(out.states.begin(), out.states.end(),
              [](const SteadyState& a, const SteadyState& b) { return a.u < b.u || (a.u == b.u && a.v < b.v); });
    return out;
}

Vec2 branch_tangent(const ModelSpec& model, const SteadyState& s) {
    const Mat2 J = model.jet().J(s.u, s.v, s.mu);
    if (J.det() == 0.0) throw NumericalError("singular Jacobian: the steady state is a fold");
    const Vec2 Fm = model.jet().F_mu(s.u, s.v, s.mu);
    return -1.0 * J.solve(Fm);
}

SteadyState continue_branch(const ModelSpec& model, const SteadyState& from, double mu_new, int max_halvings) {
    BranchWalk w = walk_branch(model, from, mu_new, max_halvings);
    if (!w.complete)
        throw BranchEndError("steady branch ends (fold) near mu = " + format_double(w.reached.mu), w.reached.mu);
    return w.reached;
}

BranchWalk walk_branch(const ModelSpec& model, const SteadyState& from, double mu_new, int max_halvings) {
    if (mu_new == from.mu) return {from, true};
    const ReactionJet& jet = model.jet();
    SteadyState cur = from;
    const double total = mu_new - from.mu;
    const double min_step = std::abs(total) * std::ldexp(1.0, -max_halvings);
    double step = total;
    auto det_sign = [&](const SteadyState& s) { return jet.J(s.u, s.v, s.mu).det() > 0.0; };
    const bool sign0 = det_sign(cur);
    while (cur.mu != mu_new) {
        double target = cur.mu + step;
        if ((total > 0 && target > mu_new) || (total < 0 && target < mu_new)) target = mu_new;
        Vec2 guess{cur.u, cur.v};
        try {
            const Vec2 t = branch_tangent(model, cur);
            guess = guess + (target - cur.mu) * t;
        } catch (const Error&) {
        }
        const double scale = std::max(1.0, std::hypot(cur.u, cur.v));
        const double pred = std::hypot(guess[0] - cur.u, guess[1] - cur.v);
        std::optional<SteadyState> next;
        if (pred <= 0.1 * scale) next = solve_steady(model, target, guess);
        bool ok = next.has_value();
        if (ok) {
            try {
                ok = det_sign(*next) == sign0;
            } catch (const EvalError&) {
                ok = false;
            }
        }
        if (ok) {
            // The corrector must stay small next to the tangent prediction,
            // otherwise Newton has probably landed on another branch.
            const double corr = std::hypot(next->u - guess[0], next->v - guess[1]);
            ok = corr <= 0.5 * pred + 1e-6 * scale;
        }
        if (ok) {
            cur = *next;
            step *= 2.0;
            continue;
        }
        step *= 0.5;
        if (std::abs(step) < min_step) return {cur, false};
    }
    return {cur, true};
}

}  // namespace dihedral
