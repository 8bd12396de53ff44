#include "dihedral/localform.hpp"

#include <algorithm>
#include <cmath>

#include "dihedral/error.hpp"

namespace dihedral {

Vec2 bilinear_Q(const LocalForm& lf, const Vec2& X, const Vec2& Y) {
    Vec2 r{};
    for (int i = 0; i < 2; ++i)
        r[i] = lf.q[i][0] * X[0] * Y[0] + lf.q[i][1] * (X[0] * Y[1] + X[1] * Y[0]) + lf.q[i][2] * X[1] * Y[1];
    return r;
}

Vec2 trilinear_C(const LocalForm& lf, const Vec2& X, const Vec2& Y, const Vec2& Z) {
    Vec2 r{};
    for (int i = 0; i < 2; ++i) {
        const double* c = lf.c[i];
        r[i] = c[0] * X[0] * Y[0] * Z[0] +
               c[1] * (X[0] * Y[0] * Z[1] + X[0] * Y[1] * Z[0] + X[1] * Y[0] * Z[0]) +
               c[2] * (X[0] * Y[1] * Z[1] + X[1] * Y[0] * Z[1] + X[1] * Y[1] * Z[0]) +
               c[3] * X[1] * Y[1] * Z[1];
    }
    return r;
}

Mat2 m2_implicit(const ModelSpec& model, const SteadyState& s) {
    const ReactionJet& jet = model.jet();
    const Vec2 t = branch_tangent(model, s);
    auto D = [&](int c, int i, int j, int l) { return jet.d(c, i, j, l, s.u, s.v, s.mu); };
    Mat2 r;
    double* out[2][2] = {{&r.a00, &r.a01}, {&r.a10, &r.a11}};
    for (int c = 0; c < 2; ++c)
        for (int col = 0; col < 2; ++col) {
            const int i = col == 0 ? 1 : 0, j = col == 0 ? 0 : 1;
            *out[c][col] = D(c, i, j, 1) + D(c, i + 1, j, 0) * t[0] + D(c, i, j + 1, 0) * t[1];
        }
    return r;
}

namespace {

struct M2Result {
    Mat2 M2;
    bool ok = false;
    double gap = 0.0;
};

M2Result m2_finite_difference(const ModelSpec& model, const SteadyState& s, double h, double tol) {
    const ReactionJet& jet = model.jet();
    auto M_at = [&](double mu) {
        const SteadyState b = continue_branch(model, s, mu);
        return jet.J(b.u, b.v, b.mu);
    };
    M2Result r;
    try {
        const Mat2 p1 = M_at(s.mu + h), m1 = M_at(s.mu - h);
        const Mat2 p2 = M_at(s.mu + 2 * h), m2 = M_at(s.mu - 2 * h);
        const Mat2 Dh = (1.0 / (2 * h)) * (p1 - m1);
        const Mat2 D2h = (1.0 / (4 * h)) * (p2 - m2);
        r.M2 = (1.0 / 3.0) * (4.0 * Dh - D2h);
        r.gap = (Dh - D2h).max_abs() / std::max(r.M2.max_abs(), 1e-300);
        r.ok = r.gap <= tol;
    } catch (const BranchEndError&) {
        r.ok = false;
    }
    return r;
}

}  // namespace

LocalForm build_local_form(const ModelSpec& model, const TuringPoint& tp, const LocalFormOptions& opt) {
    const SteadyState& s = tp.state;
    const ReactionJet& jet = model.jet();
    LocalForm lf;
    lf.M1 = jet.J(s.u, s.v, s.mu);
    lf.k = tp.k;

    const double h = opt.m2_rel_step * std::max(1.0, std::abs(s.mu));
    const M2Result fd = m2_finite_difference(model, s, h, opt.richardson_tol);
    if (fd.ok) {
        lf.M2 = fd.M2;
        lf.m2_method = "finite-difference";
        lf.m2_step = h;
        lf.m2_richardson_gap = fd.gap;
    } else {
        lf.M2 = m2_implicit(model, s);
        lf.m2_method = "implicit";
        lf.m2_richardson_gap = fd.gap;
    }

    for (int c = 0; c < 2; ++c) {
        lf.q[c][0] = 0.5 * jet.d(c, 2, 0, 0, s.u, s.v, s.mu);
        lf.q[c][1] = 0.5 * jet.d(c, 1, 1, 0, s.u, s.v, s.mu);
        lf.q[c][2] = 0.5 * jet.d(c, 0, 2, 0, s.u, s.v, s.mu);
        for (int a = 0; a < 4; ++a) lf.c[c][a] = jet.d(c, 3 - a, a, 0, s.u, s.v, s.mu) / 6.0;
    }

    const double fu = lf.M1.a00, fv = lf.M1.a01;
    if (std::abs(fv) <= 1e-14 * std::max(1.0, lf.M1.max_abs()))
        throw NumericalError("degenerate eigenbasis: d_v f vanishes at the Turing point");
    const double k2 = tp.k * tp.k;
    lf.U0 = {fv, -(k2 + fu)};
    lf.U1 = {0.0, k2};
    lf.U0d = {1.0 / fv, 0.0};
    lf.U1d = {(k2 + fu) / (k2 * fv), fv / (k2 * fv)};

    const Vec2 Q00 = bilinear_Q(lf, lf.U0, lf.U0);
    const Vec2 Q01 = bilinear_Q(lf, lf.U0, lf.U1);
    const Vec2 C000 = trilinear_C(lf, lf.U0, lf.U0, lf.U0);
    lf.gamma = dot(lf.U1d, Q00);
    lf.c0 = dot(lf.U1d, -0.25 * (lf.M2 * lf.U0));
    lf.c3 = -(5.0 / 6.0 * dot(lf.U0d, Q00) + 5.0 / 6.0 * dot(lf.U1d, Q01) + 19.0 / 18.0 * lf.gamma) * lf.gamma -
            0.75 * dot(lf.U1d, C000);
    return lf;
}

Predictors predictors(const LocalForm& lf) {
    const Vec2 Q00 = bilinear_Q(lf, lf.U0, lf.U0);
    const double qn = std::hypot(Q00[0], Q00[1]);
    if (!(std::abs(lf.gamma) > 1e-8 * qn)) throw NumericalError("gamma vanishes: the peak/gap predictor P3 is undefined");
    Predictors p;
    p.P1 = lf.c0;
    p.P2 = lf.U0[1] / lf.U0[0];
    p.P3 = lf.U0[0] / lf.gamma;
    p.P4 = lf.c3;
    return p;
}

// ---------------------------------------------------------------------------

const char* p4_class_name(P4Class c) {
    switch (c) {
        case P4Class::no_turing: return "no-turing";
        case P4Class::p4_negative: return "P4<0";
        case P4Class::p4_positive: return "P4>0";
    }
    return "?";
}

SignMapCell classify_p4_cell(const ModelSpec& model, const TuringScanOptions& scan) {
    SignMapCell cell;
    try {
        const TuringScan ts = scan_turing_points(model, scan);
        if (ts.points.empty()) {
            cell.reason = ts.rejected.empty() ? "no repeated root found" : ts.rejected.front().reason;
            return cell;
        }
        const TuringPoint& tp = ts.points.front();
        const LocalForm lf = build_local_form(model, tp);
        cell.P4 = lf.c3;
        cell.mu_star = tp.mu();
        cell.cls = lf.c3 < 0.0 ? P4Class::p4_negative : P4Class::p4_positive;
    } catch (const Error& e) {
        cell.cls = P4Class::no_turing;
        cell.reason = e.what();
    }
    return cell;
}

SignMap p4_sign_map(const ModelSpec& family, const ParamAxis& x, const ParamAxis& y, const TuringScanOptions& scan,
                    bool parallel) {
    if (x.cells < 1 || y.cells < 1) throw InputError("sign map needs at least one cell per axis");
    SignMap map{x, y, {}};
    const int total = x.cells * y.cells;
    map.cells.resize(static_cast<std::size_t>(total));
    // Validate axis names up front so errors are not swallowed per cell.
    (void)family.get(x.name);
    (void)family.get(y.name);
#pragma omp parallel for schedule(dynamic, 4) if (parallel)
    for (int idx = 0; idx < total; ++idx) {
        const int ix = idx % x.cells, iy = idx / x.cells;
        const double xv = x.centre(ix), yv = y.centre(iy);
        SignMapCell cell;
        try {
            cell = classify_p4_cell(family.with(x.name, xv).with(y.name, yv), scan);
        } catch (const Error& e) {
            cell.reason = e.what();
        }
        cell.x = xv;
        cell.y = yv;
        map.cells[static_cast<std::size_t>(idx)] = cell;
    }
    return map;
}

}  // namespace dihedral
