#pragma once

#include <string>
#include <vector>

#include "dihedral/linalg2.hpp"
#include "dihedral/model.hpp"
#include "dihedral/turing.hpp"

namespace dihedral {

/// Weakly nonlinear data at a Turing point.
struct LocalForm {
    Mat2 M1;  // J(f, g) at mu*
    Mat2 M2;  // d/dmu of J along the steady branch at mu*
    // q[c] = 1/2 {d_uu, d_uv, d_vv} of component c; c[c] = 1/6 {d_uuu, d_uuv, d_uvv, d_vvv}
    double q[2][3] = {};
    double c[2][4] = {};
    Vec2 U0{}, U1{}, U0d{}, U1d{};
    double k = 0.0;
    double gamma = 0.0, c0 = 0.0, c3 = 0.0;

    std::string m2_method;       // "finite-difference" or "implicit"
    double m2_step = 0.0;        // finite-difference step, 0 for implicit
    double m2_richardson_gap = 0.0;
};

struct Predictors {
    double P1 = 0.0, P2 = 0.0, P3 = 0.0, P4 = 0.0;
};

struct LocalFormOptions {
    double m2_rel_step = 1e-5;       // h = m2_rel_step * max(1, |mu*|)
    double richardson_tol = 3e-5;    // accepted relative gap between h and 2h differences;
                                     // the extrapolated value is then good to about gap^2
};

/// Q(X, Y) with Q(U, U) equal to the quadratic Taylor term.
Vec2 bilinear_Q(const LocalForm& lf, const Vec2& X, const Vec2& Y);
/// C(X, Y, Z) with C(U, U, U) equal to the cubic Taylor term.
Vec2 trilinear_C(const LocalForm& lf, const Vec2& X, const Vec2& Y, const Vec2& Z);

/// dM/dmu by implicit differentiation of the branch: d_mu J + d_u J u' + d_v J v'.
Mat2 m2_implicit(const ModelSpec& model, const SteadyState& s);

/// Central difference of J along the continued branch with a Richardson check
/// against step 2h. Falls back to m2_implicit() when the stencil crosses a fold
/// or the check fails.
LocalForm build_local_form(const ModelSpec& model, const TuringPoint& tp, const LocalFormOptions& opt = {});

/// Throws NumericalError when gamma vanishes (relative to |Q(U0, U0)|).
Predictors predictors(const LocalForm& lf);

// ---------------------------------------------------------------------------

enum class P4Class { no_turing = 0, p4_negative = 1, p4_positive = 2 };

const char* p4_class_name(P4Class c);

struct ParamAxis {
    std::string name;
    double lo = 0.0, hi = 1.0;
    int cells = 40;

    double centre(int i) const { return lo + (hi - lo) * (i + 0.5) / cells; }
};

struct SignMapCell {
    double x = 0.0, y = 0.0;
    P4Class cls = P4Class::no_turing;
    double P4 = 0.0;
    double mu_star = 0.0;
    std::string reason;   // why no Turing point, if so
};

struct SignMap {
    ParamAxis x, y;
    std::vector<SignMapCell> cells;  // row-major: y index outer, x index inner

    const SignMapCell& at(int ix, int iy) const { return cells[static_cast<std::size_t>(iy * x.cells + ix)]; }
};

/// Classifies each cell centre of the (x, y) parameter grid by the sign of P4
/// at the lowest valid Turing point found by scan_turing_points().
/// Cells are independent; `parallel` spreads them over OpenMP threads.
SignMap p4_sign_map(const ModelSpec& family, const ParamAxis& x, const ParamAxis& y,
                    const TuringScanOptions& scan = {}, bool parallel = true);

SignMapCell classify_p4_cell(const ModelSpec& model, const TuringScanOptions& scan);

}  // namespace dihedral
