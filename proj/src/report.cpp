#include "dihedral/report.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "dihedral/error.hpp"

namespace dihedral {

namespace {

const char* sign_word(double x) { return x > 0.0 ? "+" : (x < 0.0 ? "-" : "0"); }

}  // namespace

std::vector<std::string> interpret_predictors(const Predictors& p) {
    std::vector<std::string> out;
    if (p.P1 > 0.0)
        out.push_back("P1 > 0: localized patterns bifurcate towards mu > mu* (take eps > 0)");
    else
        out.push_back("P1 < 0: localized patterns bifurcate towards mu < mu* (take eps < 0)");
    if (p.P2 > 0.0)
        out.push_back("P2 > 0: in-phase, u and v deviations share their sign");
    else
        out.push_back("P2 < 0: anti-phase, u and v deviations have opposite signs");
    if (p.P3 > 0.0)
        out.push_back("P3 > 0: positive polarity, spot A patterns with a_0 > 0 are peaks at the centre");
    else
        out.push_back("P3 < 0: negative polarity, spot A patterns with a_0 > 0 are gaps at the centre");
    if (p.P4 < 0.0)
        out.push_back("P4 < 0: ring patterns exist and stripes bifurcate subcritically");
    else
        out.push_back("P4 > 0: no ring patterns at leading order; stripes are supercritical");
    return out;
}

std::string format_steady_report(const SteadyState& s) {
    std::ostringstream os;
    os << "u = " << format_double(s.u) << "\nv = " << format_double(s.v) << "\nmu = " << format_double(s.mu)
       << "\nresidual = " << format_double(s.residual) << "\n";
    return os.str();
}

std::string format_turing_report(const TuringPoint& tp) {
    std::ostringstream os;
    os << "mu* = " << format_double(tp.mu()) << "\n"
       << "u* = " << format_double(tp.state.u) << "\n"
       << "v* = " << format_double(tp.state.v) << "\n"
       << "k = " << format_double(tp.k) << "\n"
       << "wavelength = " << format_double(tp.wavelength()) << "\n"
       << "discriminant residual = " << format_double(tp.discriminant_residual) << "\n"
       << "steady residual = " << format_double(tp.state.residual) << "\n"
       << "eps side = " << (tp.eps_side > 0 ? "+1" : "-1") << " (no real spatial roots for mu* + side * delta)\n";
    return os.str();
}

std::string format_predictor_report(const Predictors& p) {
    std::ostringstream os;
    const double v[4] = {p.P1, p.P2, p.P3, p.P4};
    for (int i = 0; i < 4; ++i) os << "P" << i + 1 << " = " << format_double(v[i]) << "  (" << sign_word(v[i]) << ")\n";
    for (const auto& line : interpret_predictors(p)) os << line << "\n";
    return os.str();
}

std::string format_local_form_report(const LocalForm& lf) {
    std::ostringstream os;
    os << "M1 = [[" << format_double(lf.M1.a00) << ", " << format_double(lf.M1.a01) << "], [" << format_double(lf.M1.a10)
       << ", " << format_double(lf.M1.a11) << "]]\n"
       << "M2 = [[" << format_double(lf.M2.a00) << ", " << format_double(lf.M2.a01) << "], [" << format_double(lf.M2.a10)
       << ", " << format_double(lf.M2.a11) << "]]  (" << lf.m2_method << ")\n"
       << "U0 = (" << format_double(lf.U0[0]) << ", " << format_double(lf.U0[1]) << ")\n"
       << "U1 = (" << format_double(lf.U1[0]) << ", " << format_double(lf.U1[1]) << ")\n"
       << "gamma = " << format_double(lf.gamma) << "\n"
       << "c0 = " << format_double(lf.c0) << "\n"
       << "c3 = " << format_double(lf.c3) << "\n";
    return os.str();
}

std::vector<DispersionSample> dispersion_curve(const ModelSpec& model, const SteadyState& s, double k_max, int points) {
    if (!(k_max > 0.0) || points < 1) throw InputError("dispersion curve needs k_max > 0 and at least one point");
    std::vector<DispersionSample> out;
    out.reserve(static_cast<std::size_t>(points));
    for (int i = 1; i <= points; ++i) {
        const double k = k_max * i / points;
        out.push_back({k, max_growth_rate(model, s, k)});
    }
    return out;
}

}  // namespace dihedral
