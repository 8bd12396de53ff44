#include "dihedral/sim.hpp"

#include <algorithm>
#include <cmath>

#include "dihedral/error.hpp"
#include "dihedral/kernels.hpp"

namespace dihedral {

DiagonalSystem diagonalize(const ModelSpec& model) {
    DiagonalSystem s;
    s.D_v = model.D_v();
    if (model.beta() != 0.0) {
        if (model.D_v() == 1.0) throw InputError("cross-diffusion transform is singular for D_v = 1");
        s.mix = model.beta() * model.D_v() / (model.D_v() - 1.0);
    }
    const Expr u = Expr::variable(Var::u), v = Expr::variable(Var::v);
    const Expr v_phys = s.mix == 0.0 ? v : v + Expr::constant(s.mix) * u;
    const Expr fh = substitute(model.fhat(), Var::v, v_phys);
    const Expr gh = substitute(model.ghat(), Var::v, v_phys);
    s.F1 = -fh;
    s.F2 = s.mix == 0.0 ? -gh : Expr::constant(s.mix) * fh - gh;
    s.p1 = Program(s.F1, model.params());
    s.p2 = Program(s.F2, model.params());
    return s;
}

Integrator::Integrator(const ModelSpec& model, const Field2D& init, double dt, double mu, bool parallel)
    : sys_(diagonalize(model)), n_(init.n), L_(init.L), dt_(dt), mu_(mu), parallel_(parallel) {
    if (!(dt > 0.0)) throw InputError("time step must be positive");
    if (init.n < 3) throw InputError("grid too small");
    if (!init.finite()) throw InputError("initial field is not finite");
    const double h = init.h();
    const double D[2] = {1.0, sys_.D_v};
    for (int c = 0; c < 2; ++c) {
        const double r = dt * D[c] / (h * h);
        full_[c] = LineSolver(n_, r);
        third_[c] = LineSolver(n_, r / 3.0);
        quarter_[c] = LineSolver(n_, r / 4.0);
    }
    const std::size_t size = init.size();
    for (int c = 0; c < 2; ++c) {
        w_[c].resize(size);
        f_[c].resize(size);
        star_[c].resize(size);
        fs_[c].resize(size);
        next_[c].resize(size);
    }
    for (std::size_t k = 0; k < size; ++k) {
        const Vec2 hat = sys_.forward(init.u[k], init.v[k]);
        w_[0][k] = hat[0];
        w_[1][k] = hat[1];
    }
}

bool Integrator::step(double blowup) {
    const kernels::KernelSet& K = parallel_ ? kernels::kOpenMP : kernels::kSerial;
    const Program* prog[2] = {&sys_.p1, &sys_.p2};
    for (int c = 0; c < 2; ++c) K.eval(*prog[c], w_[0], w_[1], mu_, f_[c]);
    for (int c = 0; c < 2; ++c) {
        K.axpy(w_[c], dt_, f_[c], star_[c]);
        K.solve_x(full_[c], star_[c]);
        K.solve_y(full_[c], star_[c]);
    }
    for (int c = 0; c < 2; ++c) K.eval(*prog[c], star_[0], star_[1], mu_, fs_[c]);
    for (int c = 0; c < 2; ++c) {
        K.axpy(w_[c], 0.5 * dt_, f_[c], next_[c]);
        K.rdp(third_[c], quarter_[c], next_[c], scratch_);
        K.axpy(next_[c], 0.5 * dt_, fs_[c], next_[c]);
        if (!K.bounded(next_[c], blowup)) return false;
    }
    std::swap(w_[0], next_[0]);
    std::swap(w_[1], next_[1]);
    ++steps_;
    t_ = steps_ * dt_;
    return true;
}

Field2D Integrator::field() const {
    Field2D f(n_, L_);
    for (std::size_t k = 0; k < f.size(); ++k) {
        const Vec2 p = sys_.inverse(w_[0][k], w_[1][k]);
        f.u[k] = p[0];
        f.v[k] = p[1];
    }
    return f;
}

SimResult run(const ModelSpec& model, const Field2D& init, const SimConfig& cfg, const SnapshotSink& sink) {
    if (!(cfg.dt > 0.0)) throw InputError("dt must be positive");
    if (!(cfg.t_end >= 0.0)) throw InputError("t_end must be >= 0");
    if (cfg.n_grid < 64) throw InputError("n_grid must be at least 64");
    if (init.n != cfg.n_grid) throw InputError("initial field has " + std::to_string(init.n) + " points per side, config says " + std::to_string(cfg.n_grid));
    if (cfg.L > 0.0 && std::abs(init.L - cfg.L) > 1e-12 * cfg.L) throw InputError("initial field length does not match config");
    if (!std::is_sorted(cfg.snapshot_times.begin(), cfg.snapshot_times.end())) throw InputError("snapshot times must be sorted");
    for (double t : cfg.snapshot_times)
        if (t < 0.0 || t > cfg.t_end * (1 + 1e-12)) throw InputError("snapshot time " + format_double(t) + " outside [0, t_end]");

    Integrator integ(model, init, cfg.dt, cfg.mu, cfg.parallel);
    const long total = std::lround(cfg.t_end / cfg.dt);
    std::vector<long> snap_steps;
    for (double t : cfg.snapshot_times) snap_steps.push_back(std::min(total, std::lround(t / cfg.dt)));

    SimResult res;
    std::size_t next = 0;
    auto deliver = [&](long s) {
        while (next < snap_steps.size() && snap_steps[next] == s) {
            if (sink) sink(s * cfg.dt, integ.field());
            res.snapshot_times.push_back(s * cfg.dt);
            ++next;
        }
    };
    deliver(0);
    for (long s = 1; s <= total; ++s) {
        if (!integ.step(cfg.blowup)) {
            res.aborted = true;
            res.abort_reason = "solution left the bound " + format_double(cfg.blowup) + " or became non-finite at t = " +
                               format_double(s * cfg.dt);
            break;
        }
        deliver(s);
    }
    res.final = integ.field();
    res.t_final = integ.time();
    return res;
}

}  // namespace dihedral
