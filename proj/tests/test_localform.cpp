#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "dihedral/error.hpp"
#include "dihedral/kgs_oracle.hpp"
#include "dihedral/localform.hpp"
#include "dihedral/expr.hpp"
#include "dihedral/report.hpp"

using namespace dihedral;

namespace {

struct Case {
    ModelSpec model;
    TuringPoint tp;
    LocalForm lf;
};

Case at_point(const std::string& name, std::size_t index = 0) {
    ModelSpec model = builtin_model(name);
    const TuringScan scan = scan_turing_points(model);
    REQUIRE(scan.points.size() > index);
    const TuringPoint tp = scan.points[index];
    LocalForm lf = build_local_form(model, tp);
    return {std::move(model), tp, std::move(lf)};
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

double rel(const Vec2& a, const Vec2& b) {
    return std::max(std::abs(a[0] - b[0]), std::abs(a[1] - b[1])) / std::max({std::abs(b[0]), std::abs(b[1]), 1e-300});
}

// Quadratic and cubic Taylor terms summed directly from the partials.
Vec2 taylor2(const Case& c, const Vec2& U) {
    const SteadyState& s = c.tp.state;
    Vec2 r{};
    for (int comp = 0; comp < 2; ++comp)
        for (int i = 0; i <= 2; ++i) {
            const double binom = (i == 1) ? 2.0 : 1.0;
            r[static_cast<std::size_t>(comp)] += 0.5 * binom * c.model.jet().d(comp, i, 2 - i, 0, s.u, s.v, s.mu) *
                                                 std::pow(U[0], i) * std::pow(U[1], 2 - i);
        }
    return r;
}

Vec2 taylor3(const Case& c, const Vec2& U) {
    const SteadyState& s = c.tp.state;
    const double binom[] = {1, 3, 3, 1};
    Vec2 r{};
    for (int comp = 0; comp < 2; ++comp)
        for (int i = 0; i <= 3; ++i)
            r[static_cast<std::size_t>(comp)] += binom[i] / 6.0 * c.model.jet().d(comp, i, 3 - i, 0, s.u, s.v, s.mu) *
                                                 std::pow(U[0], i) * std::pow(U[1], 3 - i);
    return r;
}

}  // namespace

TEST_CASE("eigenbasis relations and duality at every builtin Turing point") {
    for (const auto& [name, idx] : std::vector<std::pair<std::string, std::size_t>>{
             {"kgs", 0}, {"nfc_gilad", 0}, {"logistic_klausmeier", 0}, {"von_hardenberg", 0}, {"von_hardenberg", 1}}) {
        CAPTURE(name);
        CAPTURE(idx);
        const Case c = at_point(name, idx);
        const LocalForm& lf = c.lf;
        const double k2 = lf.k * lf.k;
        const Vec2 a = lf.M1 * lf.U0, b = lf.M1 * lf.U1;
        const Vec2 ea = -k2 * lf.U0, eb = -k2 * lf.U1 + k2 * lf.U0;
        for (std::size_t i = 0; i < 2; ++i) {
            CHECK(std::abs(a[i] - ea[i]) < 1e-8);
            CHECK(std::abs(b[i] - eb[i]) < 1e-8);
        }
        CHECK(dot(lf.U0d, lf.U0) == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(dot(lf.U1d, lf.U1) == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(std::abs(dot(lf.U0d, lf.U1)) < 1e-10);
        CHECK(std::abs(dot(lf.U1d, lf.U0)) < 1e-10);
    }
}

TEST_CASE("Q and C reproduce the Taylor terms") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> d(-2.0, 2.0);
    for (const auto& name : {"kgs", "nfc_gilad", "von_hardenberg"}) {
        CAPTURE(name);
        const Case c = at_point(name);
        for (int t = 0; t < 20; ++t) {
            const Vec2 U{d(rng), d(rng)}, X{d(rng), d(rng)}, Y{d(rng), d(rng)}, Z{d(rng), d(rng)};
            CHECK(rel(bilinear_Q(c.lf, U, U), taylor2(c, U)) < 1e-10);
            CHECK(rel(trilinear_C(c.lf, U, U, U), taylor3(c, U)) < 1e-10);

            // symmetry and (multi)linearity
            CHECK(rel(bilinear_Q(c.lf, X, Y), bilinear_Q(c.lf, Y, X)) < 1e-13);
            const Vec2 q0 = bilinear_Q(c.lf, X, {0.0, 0.0});
            CHECK(q0[0] == 0.0);
            CHECK(q0[1] == 0.0);
            const Vec2 c0 = trilinear_C(c.lf, X, Y, {0.0, 0.0});
            CHECK(c0[0] == 0.0);
            CHECK(c0[1] == 0.0);
            const Vec2 ref = trilinear_C(c.lf, X, Y, Z);
            for (const auto& p : {trilinear_C(c.lf, X, Z, Y), trilinear_C(c.lf, Y, X, Z), trilinear_C(c.lf, Y, Z, X),
                                  trilinear_C(c.lf, Z, X, Y), trilinear_C(c.lf, Z, Y, X)})
                CHECK(rel(p, ref) < 1e-12);
            CHECK(rel(bilinear_Q(c.lf, 2.0 * X + Z, Y), 2.0 * bilinear_Q(c.lf, X, Y) + bilinear_Q(c.lf, Z, Y)) < 1e-12);
        }

        // Independent of the stored partials: symmetric differences of F itself.
        const SteadyState& s = c.tp.state;
        const Vec2 U{0.3, -0.2};
        const double h = 1e-3;
        const Vec2 Fp = c.model.jet().F(s.u + h * U[0], s.v + h * U[1], s.mu);
        const Vec2 Fm = c.model.jet().F(s.u - h * U[0], s.v - h * U[1], s.mu);
        const Vec2 F0 = c.model.jet().F(s.u, s.v, s.mu);
        const Vec2 even = (1.0 / (2 * h * h)) * (Fp + Fm - 2.0 * F0);
        const Vec2 odd = (1.0 / (2 * h * h * h)) * (Fp - Fm - 2.0 * h * (c.lf.M1 * U));
        CHECK(rel(bilinear_Q(c.lf, U, U), even) < 1e-4);
        CHECK(rel(trilinear_C(c.lf, U, U, U), odd) < 1e-3);
    }
}

TEST_CASE("KGS local form against hand-derived expressions") {
    const Case c = at_point("kgs");
    const KgsClosedForm cf = kgs_closed_form(0.5, 7.2);
    const double m = 0.5, u = cf.u_star, k2 = cf.k * cf.k, a = m - k2;
    CHECK(rel(c.lf.U0, Vec2{-u * u, a}) < 1e-9);
    CHECK(rel(c.lf.U1, Vec2{0.0, k2}) < 1e-9);

    const Vec2 shape{-u * u, a * a / (2 * m)};
    CHECK(rel(bilinear_Q(c.lf, c.lf.U0, c.lf.U0), -u * (m - 2 * k2) * shape) < 1e-8);
    CHECK(rel(trilinear_C(c.lf, c.lf.U0, c.lf.U0, c.lf.U0), u * u * a * shape) < 1e-8);
    CHECK(rel(c.lf.gamma, cf.gamma) < 1e-8);

    // M2 along the branch against the closed form
    for (double got : {c.lf.M2.a00 - cf.M2.a00, c.lf.M2.a01 - cf.M2.a01, c.lf.M2.a10 - cf.M2.a10, c.lf.M2.a11 - cf.M2.a11})
        CHECK(std::abs(got) < 1e-7 * cf.M2.max_abs());
    CHECK(c.lf.m2_method == "finite-difference");
    CHECK(rel(m2_implicit(c.model, c.tp.state).a01, cf.M2.a01) < 1e-9);
    CHECK(rel(m2_implicit(c.model, c.tp.state).a11, cf.M2.a11) < 1e-9);
}

TEST_CASE("predictors: definitions and reference values") {
    const double kTol = 2e-3;
    SUBCASE("definitional identities") {
        const Case c = at_point("nfc_gilad");
        const Predictors p = predictors(c.lf);
        CHECK(p.P1 == c.lf.c0);
        CHECK(p.P2 == c.lf.U0[1] / c.lf.U0[0]);
        CHECK(p.P3 == c.lf.U0[0] / c.lf.gamma);
        CHECK(p.P4 == c.lf.c3);
    }
    SUBCASE("kgs") {
        const Predictors p = predictors(at_point("kgs").lf);
        CHECK(std::abs(p.P1 - 6.923) < kTol);
        CHECK(std::abs(p.P2 + 0.348) < kTol);
        CHECK(std::abs(p.P3 + 1.512) < kTol);
        CHECK(std::abs(p.P4 - 0.248) < kTol);
    }
    SUBCASE("logistic_klausmeier") {
        const Predictors p = predictors(at_point("logistic_klausmeier").lf);
        CHECK(std::abs(p.P1 - 0.503) < kTol);
        CHECK(std::abs(p.P2 + 0.282) < kTol);
        CHECK(std::abs(p.P3 + 0.965) < kTol);
        CHECK(std::abs(p.P4 - 0.015) < kTol);
    }
    SUBCASE("nfc_gilad") {
        const Predictors p = predictors(at_point("nfc_gilad").lf);
        CHECK(std::abs(p.P1 - 0.381) < kTol);
        CHECK(std::abs(p.P2 + 0.207) < kTol);
        CHECK(std::abs(p.P3 + 0.575) < kTol);
        CHECK(std::abs(p.P4 - 0.818) < kTol);
    }
    SUBCASE("von_hardenberg") {
        const Predictors a = predictors(at_point("von_hardenberg", 0).lf);
        CHECK(std::abs(a.P1 + 0.384) < kTol);
        CHECK(std::abs(a.P2 - 1.707) < kTol);
        CHECK(std::abs(a.P3 - 0.8427) < kTol);
        CHECK(std::abs(a.P4 - 0.0012) < kTol);
        const Predictors b = predictors(at_point("von_hardenberg", 1).lf);
        CHECK(std::abs(b.P1 - 0.217) < kTol);
        CHECK(std::abs(b.P2 - 2.578) < kTol);
        CHECK(std::abs(b.P3 + 1.512) < kTol);
        CHECK(std::abs(b.P4 - 0.014) < kTol);
    }
    SUBCASE("vanishing gamma") {
        Case c = at_point("kgs");
        c.lf.gamma = 0.0;
        CHECK_THROWS_AS(predictors(c.lf), NumericalError);
    }
}

TEST_CASE("degenerate eigenbasis is rejected") {
    // f does not depend on v, so the eigenvector formula breaks down.
    const ModelSpec model("flat", parse("u - mu", {}), parse("v - u", {}), 2.0, 0.0, {});
    TuringPoint tp;
    tp.state = {1.0, 1.0, 1.0, 0.0};
    tp.k = 0.5;
    CHECK_THROWS_AS(build_local_form(model, tp), NumericalError);
}

TEST_CASE("pipeline predictors agree with the KGS closed forms") {
    for (double m : {0.3, 0.5, 1.2})
        for (double x : {2.5, 3.6, 8.0}) {
            const OracleReport r = kgs_oracle_compare(m, x / m);
            CAPTURE(m);
            CAPTURE(x);
            CHECK(r.max_dev < 1e-7);
        }
}

TEST_CASE("sign theorems over random KGS parameters") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> lm(std::log(0.05), std::log(3.0)), lx(std::log(2.05), std::log(40.0));
    int checked = 0;
    for (int t = 0; t < 200; ++t) {
        const double m = std::exp(lm(rng)), dv = std::exp(lx(rng)) / m;
        const ModelSpec model = builtin_model("kgs", {{"m", m}, {"delta_v", dv}});
        TuringScanOptions opt;
        opt.mu_hi = std::max(10.0, 8.0 * m);
        const TuringScan scan = scan_turing_points(model, opt);
        REQUIRE(!scan.points.empty());
        const Predictors p = predictors(build_local_form(model, scan.points.front()));
        CAPTURE(m);
        CAPTURE(dv);
        CHECK(p.P1 > 0.0);
        CHECK(p.P2 < 0.0);
        CHECK(p.P3 < 0.0);
        ++checked;
    }
    CHECK(checked == 200);
}

TEST_CASE("eigenvalue splitting off the Turing point") {
    for (const auto& [name, idx] : std::vector<std::pair<std::string, std::size_t>>{
             {"kgs", 0}, {"nfc_gilad", 0}, {"von_hardenberg", 0}, {"von_hardenberg", 1}}) {
        CAPTURE(name);
        const Case c = at_point(name, idx);
        const Predictors p = predictors(c.lf);
        const double eps = (p.P1 > 0 ? 1.0 : -1.0) * 1e-4;
        const SteadyState s = continue_branch(c.model, c.tp.state, c.tp.mu() + eps);
        const auto r = sigma_roots(c.model, s);
        const double k2 = c.lf.k * c.lf.k;
        for (const auto& l : r) {
            CHECK(std::abs(l.real() + k2) < 0.05 * k2);
            CHECK(std::abs(std::abs(l.imag()) - 2 * c.lf.k * std::sqrt(p.P1 * eps)) <
                  0.05 * 2 * c.lf.k * std::sqrt(p.P1 * eps));
        }
    }
}

TEST_CASE("P4 sign map for KGS") {
    const ModelSpec family = builtin_model("kgs");
    SUBCASE("reference cell and no-Turing cell") {
        TuringScanOptions opt;
        CHECK(classify_p4_cell(builtin_model("kgs", {{"m", 0.5}, {"delta_v", 7.2}}), opt).cls == P4Class::p4_positive);
        const SignMapCell none = classify_p4_cell(builtin_model("kgs", {{"m", 0.5}, {"delta_v", 3.0}}), opt);
        CHECK(none.cls == P4Class::no_turing);
        CHECK_FALSE(none.reason.empty());
    }
    SUBCASE("subcritical strip just above the Turing boundary") {
        // locate the closed-form sign change of P4 along m = 0.5
        double lo = 4.0 * 1.0001, hi = 7.2;
        REQUIRE(kgs_closed_form(0.5, lo).P4 < 0.0);
        REQUIRE(kgs_closed_form(0.5, hi).P4 > 0.0);
        for (int i = 0; i < 80; ++i) {
            const double mid = 0.5 * (lo + hi);
            (kgs_closed_form(0.5, mid).P4 < 0.0 ? lo : hi) = mid;
        }
        const double flip = 0.5 * (lo + hi);
        CHECK(flip > 4.0);
        CHECK(flip < 7.2);
        TuringScanOptions opt;
        const double below = 0.5 * (4.0 * 1.02 + flip), above = 0.5 * (flip + 7.2);
        CHECK(classify_p4_cell(builtin_model("kgs", {{"m", 0.5}, {"delta_v", below}}), opt).cls == P4Class::p4_negative);
        CHECK(classify_p4_cell(builtin_model("kgs", {{"m", 0.5}, {"delta_v", above}}), opt).cls == P4Class::p4_positive);
    }
    SUBCASE("small grid agrees with the closed form, serial and parallel") {
        const ParamAxis x{"delta_v", 0.5, 20.0, 9}, y{"m", 0.1, 2.0, 7};
        const SignMap par = p4_sign_map(family, x, y, {}, true);
        const SignMap ser = p4_sign_map(family, x, y, {}, false);
        REQUIRE(par.cells.size() == 63);
        for (int iy = 0; iy < y.cells; ++iy)
            for (int ix = 0; ix < x.cells; ++ix) {
                const SignMapCell& cell = par.at(ix, iy);
                CHECK(cell.cls == ser.at(ix, iy).cls);
                CHECK(cell.P4 == ser.at(ix, iy).P4);
                const KgsClosedForm cf = kgs_closed_form(cell.y, cell.x);
                const P4Class want =
                    !cf.turing ? P4Class::no_turing : (cf.P4 < 0 ? P4Class::p4_negative : P4Class::p4_positive);
                CAPTURE(cell.x);
                CAPTURE(cell.y);
                CHECK(cell.cls == want);
            }
    }
    SUBCASE("bad axes") {
        CHECK_THROWS_AS(p4_sign_map(family, {"delta_v", 1, 2, 0}, {"m", 0.1, 1, 3}), InputError);
    }
}

TEST_CASE("predictor interpretation text") {
    const auto kgs = interpret_predictors(predictors(at_point("kgs").lf));
    REQUIRE(kgs.size() == 4);
    CHECK(kgs[0].find("mu > mu*") != std::string::npos);
    CHECK(kgs[1].find("anti-phase") != std::string::npos);
    CHECK(kgs[2].find("gaps") != std::string::npos);
    CHECK(kgs[3].find("supercritical") != std::string::npos);
    const auto vh = interpret_predictors(predictors(at_point("von_hardenberg", 0).lf));
    CHECK(vh[0].find("mu < mu*") != std::string::npos);
    CHECK(vh[1].find("in-phase") != std::string::npos);
    CHECK(vh[2].find("peaks") != std::string::npos);
    Predictors neg;
    neg.P4 = -1.0;
    neg.P1 = 1.0;
    neg.P2 = -1.0;
    neg.P3 = -1.0;
    CHECK(interpret_predictors(neg)[3].find("ring patterns exist") != std::string::npos);
}
