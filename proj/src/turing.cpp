#include "dihedral/turing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>
#include <boost/math/tools/toms748_solve.hpp>

#include "dihedral/error.hpp"

namespace dihedral {

double TuringPoint::wavelength() const { return 2.0 * std::numbers::pi / k; }

double turing_discriminant(const Mat2& M) {
    const double d = M.a00 - M.a11;
    return 4.0 * M.a01 * M.a10 + d * d;
}

double turing_discriminant(const ModelSpec& model, const SteadyState& s) {
    return turing_discriminant(model.jet().J(s.u, s.v, s.mu));
}

double sigma(const ModelSpec& model, const SteadyState& s, double lambda) {
    const Mat2 M = model.jet().J(s.u, s.v, s.mu);
    return (lambda - M.a00) * (lambda - M.a11) - M.a01 * M.a10;
}

std::array<std::complex<double>, 2> sigma_roots(const ModelSpec& model, const SteadyState& s) {
    const Mat2 M = model.jet().J(s.u, s.v, s.mu);
    return quadratic_roots(M.trace(), M.det());
}

std::array<std::complex<double>, 2> growth_rates(const ModelSpec& model, const SteadyState& s, double kp) {
    const Mat2 M = model.jet().J(s.u, s.v, s.mu);
    const double Dv = model.D_v(), beta = model.beta(), k2 = kp * kp;
    // Reaction Jacobian of (-fhat, -ghat) in terms of f and g = ghat/D_v + beta f.
    const Mat2 JF{-M.a00, -M.a01, -Dv * (M.a10 - beta * M.a00), -Dv * (M.a11 - beta * M.a01)};
    const Mat2 D{1.0, 0.0, -Dv * beta, Dv};
    const Mat2 A = JF - k2 * D;
    return quadratic_roots(A.trace(), A.det());
}

double max_growth_rate(const ModelSpec& model, const SteadyState& s, double kp) {
    return growth_rates(model, s, kp)[0].real();
}

namespace {

double sgn(double x) { return x < 0.0 ? -1.0 : 1.0; }

/// Walks toward `target` until done or no further progress (a fold).
SteadyState walk_to_end(const ModelSpec& model, SteadyState cur, double target) {
    for (int round = 0; round < 10; ++round) {
        BranchWalk w = walk_branch(model, cur, target);
        const double moved = std::abs(w.reached.mu - cur.mu);
        cur = w.reached;
        if (w.complete) break;
        if (moved <= 1e-15 * std::max(1.0, std::abs(cur.mu))) break;
    }
    return cur;
}

/// Newton on (f, g, disc) = 0 in (u, v, mu). Only accepts improvements.
SteadyState polish_repeated_root(const ModelSpec& model, SteadyState s) {
    const ReactionJet& jet = model.jet();
    auto resid = [&](const Eigen::Vector3d& x) {
        const Vec2 F = jet.F(x[0], x[1], x[2]);
        const double d = turing_discriminant(jet.J(x[0], x[1], x[2]));
        return Eigen::Vector3d(F[0], F[1], d);
    };
    auto jac = [&](const Eigen::Vector3d& x) {
        auto D = [&](int c, int i, int j, int l) { return jet.d(c, i, j, l, x[0], x[1], x[2]); };
        const double fu = D(0, 1, 0, 0), fv = D(0, 0, 1, 0), gu = D(1, 1, 0, 0), gv = D(1, 0, 1, 0);
        Eigen::Matrix3d A;
        A << fu, fv, D(0, 0, 0, 1), gu, gv, D(1, 0, 0, 1), 0, 0, 0;
        // d/dx_a of (fu - gv)^2 + 4 fv gu for a = u, v, mu
        const int iu[3] = {1, 0, 0}, iv[3] = {0, 1, 0}, il[3] = {0, 0, 1};
        for (int a = 0; a < 3; ++a) {
            const double dfu = D(0, 1 + iu[a], iv[a], il[a]);
            const double dfv = D(0, iu[a], 1 + iv[a], il[a]);
            const double dgu = D(1, 1 + iu[a], iv[a], il[a]);
            const double dgv = D(1, iu[a], 1 + iv[a], il[a]);
            A(2, a) = 2.0 * (fu - gv) * (dfu - dgv) + 4.0 * (dfv * gu + fv * dgu);
        }
        return A;
    };
    try {
        Eigen::Vector3d x(s.u, s.v, s.mu);
        Eigen::Vector3d r = resid(x);
        for (int it = 0; it < 6; ++it) {
            const Eigen::Matrix3d A = jac(x);
            const Eigen::Vector3d dx = A.fullPivLu().solve(r);
            if (!dx.allFinite()) break;
            const Eigen::Vector3d y = x - dx;
            const Eigen::Vector3d ry = resid(y);
            if (!(ry.cwiseAbs().maxCoeff() < r.cwiseAbs().maxCoeff())) break;
            x = y;
            r = ry;
        }
        const double res = std::max(std::abs(r[0]), std::abs(r[1]));
        if (res < kSteadyTol) return SteadyState{x[0], x[1], x[2], res};
    } catch (const EvalError&) {
    }
    return s;
}

/// Root of the discriminant between two states on one branch.
std::optional<SteadyState> refine_on_segment(const ModelSpec& model, const SteadyState& a, const SteadyState& b) {
    std::vector<SteadyState> known{a, b};
    bool broken = false;
    auto state_at = [&](double mu) {
        const SteadyState* best = &known.front();
        for (const auto& s : known)
            if (std::abs(s.mu - mu) < std::abs(best->mu - mu)) best = &s;
        BranchWalk w = walk_branch(model, *best, mu);
        if (!w.complete) broken = true;
        known.push_back(w.reached);
        return w.reached;
    };
    auto f = [&](double mu) { return turing_discriminant(model, state_at(mu)); };
    double lo = a.mu, hi = b.mu;
    double flo = turing_discriminant(model, a), fhi = turing_discriminant(model, b);
    if (lo > hi) {
        std::swap(lo, hi);
        std::swap(flo, fhi);
    }
    if (flo == 0.0) return polish_repeated_root(model, a.mu == lo ? a : b);
    if (fhi == 0.0) return polish_repeated_root(model, a.mu == hi ? a : b);
    if (sgn(flo) == sgn(fhi)) return std::nullopt;
    std::uintmax_t iters = 200;
    auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(52), iters);
    if (broken) return std::nullopt;
    const double mu = 0.5 * (r.first + r.second);
    const SteadyState s = state_at(mu);
    if (broken) return std::nullopt;
    return polish_repeated_root(model, s);
}

/// Steady states near a fold, parametrized by the offset s along a fixed
/// direction n through c instead of by mu: F(u, v, mu) = 0, n . ((u, v) - c) = s.
/// The bordered system stays regular at the fold.
struct FoldChart {
    const ModelSpec& model;
    Vec2 c, n;

    std::optional<SteadyState> at(double s, SteadyState guess) const {
        const ReactionJet& jet = model.jet();
        Eigen::Vector3d x(guess.u, guess.v, guess.mu);
        try {
            for (int it = 0; it < 40; ++it) {
                const Vec2 F = jet.F(x[0], x[1], x[2]);
                const double con = n[0] * (x[0] - c[0]) + n[1] * (x[1] - c[1]) - s;
                const Eigen::Vector3d r(F[0], F[1], con);
                const double res = std::max(std::abs(F[0]), std::abs(F[1]));
                if (res < 1e-14 && std::abs(con) < 1e-14 * std::max(1.0, std::abs(s))) break;
                const Mat2 J = jet.J(x[0], x[1], x[2]);
                const Vec2 Fm = jet.F_mu(x[0], x[1], x[2]);
                Eigen::Matrix3d A;
                A << J.a00, J.a01, Fm[0], J.a10, J.a11, Fm[1], n[0], n[1], 0.0;
                const Eigen::Vector3d dx = A.fullPivLu().solve(r);
                if (!dx.allFinite()) return std::nullopt;
                x -= dx;
            }
            const Vec2 F = jet.F(x[0], x[1], x[2]);
            const double res = std::max(std::abs(F[0]), std::abs(F[1]));
            if (!(res < kSteadyTol)) return std::nullopt;
            return SteadyState{x[0], x[1], x[2], res};
        } catch (const EvalError&) {
            return std::nullopt;
        }
    }
};

/// Repeated roots on the stretch of branch through a fold between states a
/// and b (one on each side of the fold).
std::vector<SteadyState> roots_across_fold(const ModelSpec& model, const SteadyState& a, const SteadyState& b) {
    std::vector<SteadyState> out;
    const Vec2 d{b.u - a.u, b.v - a.v};
    const double len = std::hypot(d[0], d[1]);
    if (!(len > 0.0)) return out;
    FoldChart chart{model, {0.5 * (a.u + b.u), 0.5 * (a.v + b.v)}, (1.0 / len) * d};
    const double sa = -0.5 * len, sb = 0.5 * len;

    constexpr int kPieces = 32;
    std::vector<SteadyState> pts;
    std::vector<double> ss;
    SteadyState guess = a;
    for (int i = 0; i <= kPieces; ++i) {
        const double s = sa + (sb - sa) * i / kPieces;
        auto p = i == 0 ? std::optional<SteadyState>(a) : (i == kPieces ? std::optional<SteadyState>(b) : chart.at(s, guess));
        if (!p) return out;   // the chart does not cover this stretch
        pts.push_back(*p);
        ss.push_back(s);
        guess = *p;
    }
    for (int i = 0; i < kPieces; ++i) {
        double flo, fhi;
        try {
            flo = turing_discriminant(model, pts[static_cast<std::size_t>(i)]);
            fhi = turing_discriminant(model, pts[static_cast<std::size_t>(i + 1)]);
        } catch (const EvalError&) {
            continue;
        }
        if (sgn(flo) == sgn(fhi)) continue;
        SteadyState last = pts[static_cast<std::size_t>(i)];
        bool ok = true;
        auto f = [&](double s) {
            auto p = chart.at(s, last);
            if (!p) {
                ok = false;
                return flo;
            }
            last = *p;
            return turing_discriminant(model, *p);
        };
        std::uintmax_t iters = 200;
        auto r = boost::math::tools::toms748_solve(f, ss[static_cast<std::size_t>(i)], ss[static_cast<std::size_t>(i + 1)], flo, fhi,
                                                   boost::math::tools::eps_tolerance<double>(52), iters);
        if (!ok) continue;
        auto p = chart.at(0.5 * (r.first + r.second), last);
        if (p) out.push_back(polish_repeated_root(model, *p));
    }
    return out;
}

}  // namespace

TuringPoint classify_turing_point(const ModelSpec& model, const SteadyState& s, const TuringOptions& opt) {
    const Mat2 M = model.jet().J(s.u, s.v, s.mu);
    TuringPoint tp;
    tp.state = s;
    tp.discriminant_residual = turing_discriminant(M);
    const double k2 = -0.5 * M.trace();
    if (!(k2 > 0.0)) {
        const bool bd = k2 < 0.0;
        throw NotTuringPointError(bd ? "repeated positive root: Belyakov-Devaney point, not a Turing point"
                                     : "repeated root at zero: not a Turing point",
                                  bd);
    }
    tp.k = std::sqrt(k2);
    tp.repeated_negative_root = true;
    if (std::abs(tp.discriminant_residual) >= 1e-9)
        throw NumericalError("repeated-root condition not met: discriminant " + format_double(tp.discriminant_residual));

    // Probe both sides; shrink the offset if a fold is closer than delta.
    double delta = opt.side_rel_delta * std::max(1.0, std::abs(s.mu));
    for (int shrink = 0; shrink < 40; ++shrink, delta *= 0.5) {
        BranchWalk up = walk_branch(model, s, s.mu + delta);
        BranchWalk dn = walk_branch(model, s, s.mu - delta);
        if (!up.complete || !dn.complete) continue;
        const double dup = turing_discriminant(model, up.reached), ddn = turing_discriminant(model, dn.reached);
        int side = 0;
        if (dup < 0.0 && ddn > 0.0) side = +1;
        else if (ddn < 0.0 && dup > 0.0) side = -1;
        if (side == 0) break;
        const SteadyState& real_side = side > 0 ? dn.reached : up.reached;
        const Mat2 Mr = model.jet().J(real_side.u, real_side.v, real_side.mu);
        // two distinct negative roots: positive discriminant, negative trace, positive determinant
        if (!(Mr.trace() < 0.0 && Mr.det() > 0.0)) break;
        tp.eps_side = side;
        tp.side_delta = delta;
        tp.sides_verified = true;
        return tp;
    }
    throw NotTuringPointError("sigma does not change from two negative roots to complex roots across mu*", false);
}

TuringPoint find_turing_point(const ModelSpec& model, double mu_guess, Vec2 state_guess, const TuringOptions& opt) {
    auto s0 = solve_steady(model, mu_guess, state_guess);
    if (!s0) throw NumericalError("no steady state found near the guess at mu = " + format_double(mu_guess));
    const double d0 = turing_discriminant(model, *s0);
    if (d0 == 0.0) return classify_turing_point(model, polish_repeated_root(model, *s0), opt);

    const double delta0 = 1e-4 * std::max(1.0, std::abs(mu_guess));
    SteadyState last[2] = {*s0, *s0};
    bool alive[2] = {true, true};
    for (int j = 0; j < opt.max_expansions && (alive[0] || alive[1]); ++j) {
        for (int dir = 0; dir < 2; ++dir) {
            if (!alive[dir]) continue;
            const double target = mu_guess + (dir == 0 ? 1.0 : -1.0) * delta0 * std::ldexp(1.0, j);
            SteadyState next = last[dir];
            BranchWalk w = walk_branch(model, last[dir], target);
            if (w.complete) {
                next = w.reached;
            } else {
                next = walk_to_end(model, w.reached, target);
                alive[dir] = false;
            }
            double dn;
            try {
                dn = turing_discriminant(model, next);
            } catch (const EvalError&) {
                alive[dir] = false;
                continue;
            }
            if (sgn(dn) != sgn(turing_discriminant(model, last[dir]))) {
                auto root = refine_on_segment(model, last[dir], next);
                if (!root) throw NumericalError("failed to resolve the repeated-root condition along the branch");
                return classify_turing_point(model, *root, opt);
            }
            last[dir] = next;
        }
    }
    throw NumericalError("no sign change of the repeated-root condition found along the branch");
}

// ---------------------------------------------------------------------------

namespace {

struct Scanner {
    const ModelSpec& model;
    const TuringScanOptions& opt;
    std::vector<double> grid;
    std::vector<std::vector<SteadyState>> covered;
    std::vector<std::pair<SteadyState, SteadyState>> segments;
    std::vector<std::pair<SteadyState, SteadyState>> folds;   // branch ends on either side of a fold
    std::vector<std::pair<SteadyState, int>> queue;

    double tol_state(const SteadyState& s) const { return 1e-6 * std::max(1.0, std::hypot(s.u, s.v)); }

    bool is_covered(int i, const SteadyState& s) const {
        for (const auto& c : covered[static_cast<std::size_t>(i)])
            if (std::hypot(c.u - s.u, c.v - s.v) <= tol_state(s)) return true;
        return false;
    }

    int next_index(double mu, int dir) const {
        const int n = static_cast<int>(grid.size());
        if (dir > 0) {
            for (int i = 0; i < n; ++i)
                if (grid[static_cast<std::size_t>(i)] > mu) return i;
            return n;
        }
        for (int i = n - 1; i >= 0; --i)
            if (grid[static_cast<std::size_t>(i)] < mu) return i;
        return -1;
    }

    double local_step(double mu) const {
        if (grid.size() < 2) return 1.0;
        const auto it = std::lower_bound(grid.begin(), grid.end(), mu);
        const std::size_t i = std::clamp<std::size_t>(static_cast<std::size_t>(it - grid.begin()), 1, grid.size() - 1);
        return grid[i] - grid[i - 1];
    }

    static Vec2 null_vector(const Mat2& J) {
        Vec2 a{-J.a01, J.a00}, b{-J.a11, J.a10};
        Vec2 n = norm_inf(a) >= norm_inf(b) ? a : b;
        const double len = std::hypot(n[0], n[1]);
        if (len == 0.0) return {1.0, 0.0};
        return (1.0 / len) * n;
    }

    /// From a fold end approached in direction dir, start the other branch.
    void turn(const SteadyState& end, int dir) {
        const double h = 1e-3 * local_step(end.mu);
        const double mut = end.mu - dir * h;
        BranchWalk back = walk_branch(model, end, mut);
        if (!back.complete) return;
        const SteadyState& incoming = back.reached;
        const double d_in = std::hypot(incoming.u - end.u, incoming.v - end.v);
        Vec2 n;
        try {
            n = null_vector(model.jet().J(end.u, end.v, end.mu));
        } catch (const EvalError&) {
            return;
        }
        std::optional<SteadyState> best;
        double best_d = 0.0;
        const double scale = std::max(1.0, std::hypot(end.u, end.v));
        for (double mag : {1e-4, 1e-3, 1e-2, 1e-1, 1.0})
            for (double sgn_ : {1.0, -1.0}) {
                const Vec2 seed{end.u + sgn_ * mag * scale * n[0], end.v + sgn_ * mag * scale * n[1]};
                auto c = solve_steady(model, mut, seed);
                if (!c) continue;
                const double dc_in = std::hypot(c->u - incoming.u, c->v - incoming.v);
                const double dc_end = std::hypot(c->u - end.u, c->v - end.v);
                if (dc_in <= 0.5 * d_in || dc_end > 10.0 * d_in + 1e-8) continue;
                if (!best || dc_end < best_d) {
                    best = c;
                    best_d = dc_end;
                }
            }
        if (!best) return;
        // The piece between the fold and the new start belongs to the new branch.
        SteadyState near_fold = walk_to_end(model, *best, end.mu);
        segments.emplace_back(near_fold, *best);
        folds.emplace_back(end, near_fold);
        queue.emplace_back(*best, -dir);
    }

    void trace(SteadyState cur, int dir) {
        int i = next_index(cur.mu, dir);
        const int n = static_cast<int>(grid.size());
        while (i >= 0 && i < n) {
            const double target = grid[static_cast<std::size_t>(i)];
            BranchWalk w = walk_branch(model, cur, target);
            if (w.complete) {
                const bool seen = is_covered(i, w.reached);
                segments.emplace_back(cur, w.reached);
                if (seen) return;
                covered[static_cast<std::size_t>(i)].push_back(w.reached);
                cur = w.reached;
                i += dir;
                continue;
            }
            const SteadyState end = walk_to_end(model, w.reached, target);
            segments.emplace_back(cur, end);
            turn(end, dir);
            return;
        }
    }

    void start(const SteadyState& s) {
        queue.emplace_back(s, +1);
        queue.emplace_back(s, -1);
    }
};

}  // namespace

TuringScan scan_turing_points(const ModelSpec& model, const TuringScanOptions& opt) {
    if (!(opt.mu_hi > opt.mu_lo) || opt.samples < 2) throw InputError("scan range must satisfy mu_lo < mu_hi, samples >= 2");
    Scanner sc{model, opt, {}, {}, {}, {}, {}};
    // Geometric spacing for positive ranges keeps the relative resolution
    // uniform, so closely spaced roots at small mu are not merged.
    const bool geometric = opt.mu_lo > 0.0;
    for (int i = 0; i < opt.samples; ++i) {
        const double t = static_cast<double>(i) / (opt.samples - 1);
        sc.grid.push_back(geometric ? opt.mu_lo * std::pow(opt.mu_hi / opt.mu_lo, t) : opt.mu_lo + (opt.mu_hi - opt.mu_lo) * t);
    }
    sc.grid.back() = opt.mu_hi;
    sc.covered.resize(sc.grid.size());

    const int levels = std::max(opt.seed_levels, 1);
    for (int l = 0; l < levels; ++l) {
        const int gi = levels == 1 ? 0 : (opt.samples - 1) * l / (levels - 1);
        const double mu = sc.grid[static_cast<std::size_t>(gi)];
        for (const auto& s : find_steady_states(model, mu, {}, opt.steady).states) {
            if (sc.is_covered(gi, s)) continue;
            sc.covered[static_cast<std::size_t>(gi)].push_back(s);
            sc.start(s);
            int traced_branches = 0;
            while (!sc.queue.empty() && traced_branches < 16) {
                auto [st, dir] = sc.queue.back();
                sc.queue.pop_back();
                sc.trace(st, dir);
                ++traced_branches;
            }
            sc.queue.clear();
        }
    }

    std::vector<SteadyState> candidates;
    for (const auto& [a, b] : sc.segments) {
        double da, db;
        try {
            da = turing_discriminant(model, a);
            db = turing_discriminant(model, b);
        } catch (const EvalError&) {
            continue;
        }
        if (sgn(da) == sgn(db)) continue;
        if (auto r = refine_on_segment(model, a, b)) candidates.push_back(*r);
    }
    for (const auto& [a, b] : sc.folds)
        for (const auto& r : roots_across_fold(model, a, b)) candidates.push_back(r);

    TuringScan out;
    std::vector<SteadyState> roots;
    for (const auto& cand : candidates) {
        const std::optional<SteadyState> r = cand;
        bool dup = false;
        for (const auto& q : roots)
            if (std::abs(q.mu - r->mu) + std::abs(q.u - r->u) + std::abs(q.v - r->v) < 1e-7 * std::max(1.0, std::abs(r->mu)))
                dup = true;
        if (dup) continue;
        roots.push_back(*r);
        if (opt.steady.reject_negative && (r->u < -1e-12 || r->v < -1e-12)) {
            out.rejected.push_back({*r, false, "negative steady state"});
            continue;
        }
        try {
            out.points.push_back(classify_turing_point(model, *r, opt.turing));
        } catch (const NotTuringPointError& e) {
            out.rejected.push_back({*r, e.belyakov_devaney(), e.what()});
        } catch (const NumericalError& e) {
            out.rejected.push_back({*r, false, e.what()});
        }
    }
    std::sort(out.points.begin(), out.points.end(), [](const TuringPoint& a, const TuringPoint& b) { return a.mu() < b.mu(); });
    return out;
}

}  // namespace dihedral
