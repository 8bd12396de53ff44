#include "dihedral/kgs_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dihedral/error.hpp"
#include "dihedral/model.hpp"

namespace dihedral {

double kgs_u_plus(double m, double mu) {
    const double a = mu / (2 * m);
    return a + std::sqrt(a * a - 1.0);
}

double kgs_u_minus(double m, double mu) {
    const double a = mu / (2 * m);
    return 1.0 / (a + std::sqrt(a * a - 1.0));  // = a - sqrt(a^2 - 1) without cancellation
}

KgsClosedForm kgs_closed_form(double m, double dv) {
    const double x = dv * m;
    if (!(m > 0.0) || !(dv > 0.0)) throw InputError("closed form needs m > 0 and delta_v > 0");
    KgsClosedForm c;
    c.m = m;
    c.delta_v = dv;
    c.has_repeated_roots = x >= 1.0;
    c.turing = x > 2.0;
    if (!c.has_repeated_roots) return c;

    const double root = std::sqrt(8 * x * x - 8 * x);
    c.u_star_minus = std::sqrt(3 * x - 1 - root);
    c.u_star_plus = std::sqrt(3 * x - 1 + root);
    c.mu_star_minus = m * (1 + c.u_star_minus * c.u_star_minus) / c.u_star_minus;
    c.mu_star_plus = m * (1 + c.u_star_plus * c.u_star_plus) / c.u_star_plus;
    const double s = std::sqrt(x * x + (x - 2) * x);
    c.lambda_minus = (x - s) / dv;
    c.lambda_plus = (x + s) / dv;
    if (!c.turing) return c;

    const double u = c.u_star_minus, u2 = u * u;
    const double k2 = (std::sqrt(2 * x * x - 2 * x) - x) / dv;
    const double a = m - k2, b = m + k2, d = m - 2 * k2;
    c.u_star = u;
    c.v_star = m / u;
    c.mu_star = c.mu_star_minus;
    c.k = std::sqrt(k2);

    c.M1 = {-m, -u2, a * a / u2, d};
    c.M2 = {0.0, -2 * u2 * u / (m * (u2 - 1)), 0.0, u * a * a / (m * m * (u2 - 1))};
    c.U0 = {-u2, a};
    c.U1 = {0.0, k2};
    c.U0d = {-1.0 / u2, 0.0};
    c.U1d = {a / (k2 * u2), 1.0 / k2};

    c.U0d_Q00 = -u * d;
    c.U1d_Q00 = u * d * a * b / (2 * m * k2);
    c.U1d_Q01 = u * a * b / (2 * m);
    c.U1d_C000 = -u2 * a * a * b / (2 * m * k2);
    c.gamma = c.U1d_Q00;

    c.P1 = u * a * a * b / (4 * k2 * m * m * (u2 - 1));
    c.P2 = -a / u2;
    c.P3 = -2 * u * m * k2 / (d * a * b);
    c.P4 = 5.0 / 6.0 * (u2 * d * d * a * b / (2 * m * k2)) - 5.0 / 6.0 * (u2 * d * a * a * b * b / (4 * m * m * k2)) -
           19.0 / 18.0 * (u2 * d * d * a * a * b * b / (4 * m * m * k2 * k2)) + 0.75 * (u2 * a * a * b / (2 * m * k2));
    return c;
}

OracleReport kgs_oracle_compare(double m, double dv) {
    if (!(dv * m > 2.05)) throw InputError("oracle comparison needs delta_v * m > 2.05");
    OracleReport r;
    r.closed = kgs_closed_form(m, dv);
    const ModelSpec model = builtin_model("kgs", {{"m", m}, {"delta_v", dv}});
    TuringScanOptions scan;
    scan.mu_lo = 0.05;
    scan.mu_hi = std::max(10.0, 8.0 * m);
    const TuringScan ts = scan_turing_points(model, scan);
    if (ts.points.empty()) throw NumericalError("generic pipeline found no Turing point");
    r.tp = ts.points.front();
    const LocalForm lf = build_local_form(model, r.tp);
    r.pred = predictors(lf);
    r.m2_method = lf.m2_method;

    auto rel = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); };
    const KgsClosedForm& c = r.closed;
    r.dev_mu = rel(r.tp.mu(), c.mu_star);
    r.dev_u = rel(r.tp.state.u, c.u_star);
    r.dev_v = rel(r.tp.state.v, c.v_star);
    r.dev_k = rel(r.tp.k, c.k);
    r.dev_P[0] = rel(r.pred.P1, c.P1);
    r.dev_P[1] = rel(r.pred.P2, c.P2);
    r.dev_P[2] = rel(r.pred.P3, c.P3);
    r.dev_P[3] = rel(r.pred.P4, c.P4);
    r.max_dev = std::max({r.dev_mu, r.dev_u, r.dev_v, r.dev_k, r.dev_P[0], r.dev_P[1], r.dev_P[2], r.dev_P[3]});
    r.pass = r.max_dev < kOracleTol;
    return r;
}

std::string format_oracle_report(const OracleReport& r) {
    std::ostringstream os;
    os.precision(10);
    const KgsClosedForm& c = r.closed;
    os << "kgs oracle: m = " << c.m << ", delta_v = " << c.delta_v << "\n";
    os << "quantity      closed-form        pipeline           rel.dev\n";
    auto row = [&](const char* name, double a, double b, double d) {
        os << name;
        for (std::size_t i = std::char_traits<char>::length(name); i < 14; ++i) os << ' ';
        os << a << "  " << b << "  " << d << "\n";
    };
    row("mu*", c.mu_star, r.tp.mu(), r.dev_mu);
    row("u*", c.u_star, r.tp.state.u, r.dev_u);
    row("v*", c.v_star, r.tp.state.v, r.dev_v);
    row("k", c.k, r.tp.k, r.dev_k);
    row("P1", c.P1, r.pred.P1, r.dev_P[0]);
    row("P2", c.P2, r.pred.P2, r.dev_P[1]);
    row("P3", c.P3, r.pred.P3, r.dev_P[2]);
    row("P4", c.P4, r.pred.P4, r.dev_P[3]);
    os << "M2 method: " << r.m2_method << "\n";
    os << "lambda+ = " << c.lambda_plus << " (Belyakov-Devaney point at mu = " << c.mu_star_plus << ")\n";
    os << "max relative deviation " << r.max_dev << " -> " << (r.pass ? "PASS" : "FAIL") << " (tol " << kOracleTol << ")\n";
    return os.str();
}

}  // namespace dihedral
