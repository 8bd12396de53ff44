#include "dihedral/growth.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "dihedral/error.hpp"
#include "dihedral/linalg2.hpp"
#include "dihedral/sim.hpp"

namespace dihedral {

GrowthMeasurement linear_growth_check(const ModelSpec& model, const SteadyState& s, double k, const GrowthOptions& opt) {
    if (!(k > 0.0)) throw InputError("growth check needs k_perturb > 0");
    if (opt.half_waves < 1 || opt.min_window_steps < 2 || !(opt.dt > 0.0) || !(opt.amplitude > 0.0))
        throw InputError("growth check: bad options");
    const int n = opt.n_grid;
    const double L = opt.half_waves * std::numbers::pi / k;
    std::vector<double> basis(static_cast<std::size_t>(n)), weight(static_cast<std::size_t>(n));
    double norm = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        basis[ui] = std::cos(k * (i * L / (n - 1)));
        weight[ui] = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        norm += weight[ui] * basis[ui] * basis[ui];
    }

    // The mode is uniform in y, so one row carries its amplitude.
    auto project = [&](const Field2D& f) {
        Vec2 a{0.0, 0.0};
        for (int i = 0; i < n; ++i) {
            const double w = weight[static_cast<std::size_t>(i)] * basis[static_cast<std::size_t>(i)] / norm;
            a[0] += w * (f.u[f.index(i, 0)] - s.u);
            a[1] += w * (f.v[f.index(i, 0)] - s.v);
        }
        return (1.0 / opt.amplitude) * a;
    };

    long steps = std::lround(opt.t_short / opt.dt);
    steps -= steps % 2;
    if (steps < opt.min_window_steps) throw InputError("growth check: t_short shorter than the minimum window");

    // traj[c][st] is column c of the mode propagator after st steps.
    std::vector<Vec2> traj[2];
    for (int c = 0; c < 2; ++c) {
        Field2D init(n, L);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const double d = opt.amplitude * basis[static_cast<std::size_t>(i)];
                init.u[init.index(i, j)] = s.u + (c == 0 ? d : 0.0);
                init.v[init.index(i, j)] = s.v + (c == 1 ? d : 0.0);
            }
        Integrator integ(model, init, opt.dt, s.mu, opt.parallel);
        traj[c].reserve(static_cast<std::size_t>(steps + 1));
        traj[c].push_back(project(init));
        for (long st = 1; st <= steps; ++st) {
            if (!integ.step()) throw NumericalError("growth check: solution blew up");
            traj[c].push_back(project(integ.field()));
        }
    }
    auto P_at = [&](long st) {
        const Vec2& a = traj[0][static_cast<std::size_t>(st)];
        const Vec2& b = traj[1][static_cast<std::size_t>(st)];
        return Mat2{a[0], b[0], a[1], b[1]};
    };

    GrowthMeasurement out;
    long w = steps;
    double misfit = 0.0;
    Mat2 P;
    for (;;) {
        P = P_at(w);
        const Mat2 half = P_at(w / 2);
        misfit = (P - half * half).max_abs() / std::max(P.max_abs(), 1e-300);
        if (misfit <= opt.fit_tol || w / 2 < opt.min_window_steps || (w / 2) % 2 != 0) break;
        w /= 2;
        ++out.shortened;
    }
    if (misfit > opt.fit_tol)
        throw NumericalError("growth check: mode amplitudes are not linear (misfit " + format_double(misfit) + ")");
    const double tau = w * opt.dt;
    const auto roots = quadratic_roots(P.trace(), P.det());
    for (int i = 0; i < 2; ++i) out.omega[static_cast<std::size_t>(i)] = std::log(roots[static_cast<std::size_t>(i)]) / tau;
    out.rate = std::max(out.omega[0].real(), out.omega[1].real());
    out.fit_residual = misfit;
    out.window = tau;
    return out;
}

}  // namespace dihedral
