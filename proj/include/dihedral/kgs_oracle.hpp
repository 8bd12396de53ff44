#pragma once

#include <string>

#include "dihedral/linalg2.hpp"
#include "dihedral/localform.hpp"
#include "dihedral/turing.hpp"

namespace dihedral {

/// Hand-derived closed forms for the Klausmeier-Gray-Scott model
/// (fhat = -v u^2 + m u, ghat = -mu + v + v u^2, D_v = delta_v).
struct KgsClosedForm {
    double m = 0.0, delta_v = 0.0;
    bool has_repeated_roots = false;   // delta_v m >= 1
    bool turing = false;               // delta_v m > 2

    double u_star_minus = 0.0, u_star_plus = 0.0;
    double mu_star_minus = 0.0, mu_star_plus = 0.0;
    double lambda_minus = 0.0, lambda_plus = 0.0;

    // At the Turing point (u* = u_star_minus); zero unless `turing`.
    double u_star = 0.0, v_star = 0.0, mu_star = 0.0, k = 0.0;
    Mat2 M1, M2;
    Vec2 U0{}, U1{}, U0d{}, U1d{};
    // Projections used by the constants.
    double U0d_Q00 = 0.0, U1d_Q00 = 0.0, U1d_Q01 = 0.0, U1d_C000 = 0.0;
    double gamma = 0.0;
    double P1 = 0.0, P2 = 0.0, P3 = 0.0, P4 = 0.0;
};

/// Throws InputError when delta_v m <= 0.
KgsClosedForm kgs_closed_form(double m, double delta_v);

/// Steady branches u_-(mu) <= u_+(mu), for mu >= 2m.
double kgs_u_plus(double m, double mu);
double kgs_u_minus(double m, double mu);

struct OracleReport {
    KgsClosedForm closed;
    TuringPoint tp;
    Predictors pred;
    std::string m2_method;
    double dev_mu = 0, dev_u = 0, dev_v = 0, dev_k = 0;
    double dev_P[4] = {0, 0, 0, 0};
    double max_dev = 0;
    bool pass = false;
};

inline constexpr double kOracleTol = 1e-7;

/// Runs the generic pipeline on the KGS model and compares it with the closed
/// forms. Requires delta_v m > 2.05.
OracleReport kgs_oracle_compare(double m, double delta_v);

std::string format_oracle_report(const OracleReport& r);

}  // namespace dihedral
