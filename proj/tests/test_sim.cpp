#include <doctest.h>

#include <cmath>
#include <random>

#include "dihedral/error.hpp"
#include "dihedral/growth.hpp"
#include "dihedral/kernels.hpp"
#include "dihedral/metrics.hpp"
#include "dihedral/presets.hpp"
#include "dihedral/sim.hpp"

using namespace dihedral;

namespace {

double max_diff(const Field2D& a, const Field2D& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max({m, std::abs(a.u[i] - b.u[i]), std::abs(a.v[i] - b.v[i])});
    return m;
}

Field2D random_field(int n, double L, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(0.0, 1.0);
    Field2D f(n, L);
    for (std::size_t i = 0; i < f.size(); ++i) {
        f.u[i] = d(rng);
        f.v[i] = d(rng);
    }
    return f;
}

ModelSpec diffusion_only(double Dv, double beta) {
    return ModelSpec("diffusion", parse("0 * u", {}), parse("0 * v", {}), Dv, beta, {});
}

Field2D advance(const ModelSpec& model, const Field2D& init, double dt, double mu, double t, bool parallel = true) {
    Integrator it(model, init, dt, mu, parallel);
    const long steps = std::lround(t / dt);
    for (long s = 0; s < steps; ++s) REQUIRE(it.step());
    return it.field();
}

}  // namespace

TEST_CASE("diagonalizing transform") {
    const DiagonalSystem id = diagonalize(builtin_model("kgs"));
    CHECK(id.mix == 0.0);
    CHECK(id.forward(0.3, 0.7)[1] == 0.7);

    const DiagonalSystem vh = diagonalize(builtin_model("von_hardenberg"));
    CHECK(vh.mix == doctest::Approx(300.0 / 99.0).epsilon(1e-15));
    CHECK(vh.D_v == 100.0);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> d(-3.0, 3.0);
    for (int t = 0; t < 100; ++t) {
        const double u = d(rng), v = d(rng);
        const Vec2 f = vh.forward(u, v), b = vh.inverse(f[0], f[1]);
        CHECK(std::abs(b[0] - u) < 1e-14);
        CHECK(std::abs(b[1] - v) < 1e-14);
    }
    CHECK_THROWS_AS(diagonalize(diffusion_only(1.0, 2.0)), InputError);
    CHECK_NOTHROW(diagonalize(diffusion_only(1.0, 0.0)));

    // the transformed reactions reproduce the physical time derivative
    const ModelSpec model = builtin_model("von_hardenberg");
    const Vec2 uv{0.3, 0.6};
    const double mu = 0.4;
    const Vec2 w = vh.forward(uv[0], uv[1]);
    const Bindings at{w[0], w[1], mu, model.params()};
    const double F1 = evaluate(vh.F1, at), F2 = evaluate(vh.F2, at);
    const Bindings phys{uv[0], uv[1], mu, model.params()};
    const double fhat = evaluate(model.fhat(), phys), ghat = evaluate(model.ghat(), phys);
    CHECK(F1 == doctest::Approx(-fhat).epsilon(1e-13));
    CHECK(F2 == doctest::Approx(-ghat + vh.mix * fhat).epsilon(1e-13));
}

TEST_CASE("line solver inverts I + r T") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (int n : {3, 8, 65})
        for (double r : {0.01, 1.0, 300.0}) {
            const LineSolver s(n, r);
            std::vector<double> x(static_cast<std::size_t>(n * n));
            for (auto& v : x) v = d(rng);
            std::vector<double> w = x;
            kernels::serial::solve_x(s, w);
            // apply I + r T row by row with the ghost rows [2, -2], [-2, 2] (in units of -1 / h^2)
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i) {
                    auto at = [&](int ii) { return w[static_cast<std::size_t>(j * n + ii)]; };
                    const double left = i == 0 ? at(1) : at(i - 1), right = i == n - 1 ? at(n - 2) : at(i + 1);
                    const double lhs = at(i) + r * (2 * at(i) - left - right);
                    CHECK(lhs == doctest::Approx(x[static_cast<std::size_t>(j * n + i)]).epsilon(1e-10).scale(1.0));
                }
        }
}

TEST_CASE("serial and OpenMP kernels agree") {
    const int n = 97;
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    std::vector<double> a(n * n), b(n * n);
    for (auto& x : a) x = d(rng);
    for (auto& x : b) x = d(rng);
    const LineSolver full(n, 0.7), third(n, 0.7 / 3), quarter(n, 0.7 / 4);
    std::vector<double> sa = a, oa = a, scratch;
    kernels::serial::solve_x(full, sa);
    kernels::omp::solve_x(full, oa);
    CHECK(sa == oa);
    kernels::serial::solve_y(full, sa);
    kernels::omp::solve_y(full, oa);
    CHECK(sa == oa);
    kernels::serial::rdp(third, quarter, sa, scratch);
    kernels::omp::rdp(third, quarter, oa, scratch);
    CHECK(sa == oa);
    std::vector<double> so(n * n), oo(n * n);
    kernels::serial::axpy(a, 0.3, b, so);
    kernels::omp::axpy(a, 0.3, b, oo);
    CHECK(so == oo);
    const DiagonalSystem sys = diagonalize(builtin_model("von_hardenberg"));
    kernels::serial::eval(sys.p2, a, b, 0.4, so);
    kernels::omp::eval(sys.p2, a, b, 0.4, oo);
    CHECK(so == oo);
    CHECK(kernels::serial::bounded(a, 2.0));
    CHECK(kernels::omp::bounded(a, 2.0));
    a[500] = std::nan("");
    CHECK_FALSE(kernels::serial::bounded(a, 2.0));
    CHECK_FALSE(kernels::omp::bounded(a, 2.0));
    a[500] = 5.0;
    CHECK_FALSE(kernels::omp::bounded(a, 2.0));

    // whole runs
    PresetOverrides ov;
    ov.n_grid = 64;
    const PreparedRun run = prepare_preset("vh2:hexagon", ov);
    const Field2D init = initial_field(run);
    CHECK(max_diff(advance(run.model, init, 0.1, run.cfg.mu, 5.0, true), advance(run.model, init, 0.1, run.cfg.mu, 5.0, false)) ==
          0.0);
}

TEST_CASE("pure diffusion conserves the mean and respects the Neumann condition") {
    for (const auto& [Dv, beta] : std::vector<std::pair<double, double>>{{1.0, 0.0}, {7.2, 0.0}, {100.0, 3.0}}) {
        CAPTURE(Dv);
        const ModelSpec model = diffusion_only(Dv, beta);
        const Field2D init = random_field(65, 40.0, 3);
        const double mu0 = trapezoid_mean(init.u, 65), mv0 = trapezoid_mean(init.v, 65);
        const double T = 10.0;
        const Field2D f = advance(model, init, 0.1, 0.0, T);
        CHECK(std::abs(trapezoid_mean(f.u, 65) - mu0) < 1e-10 * T);
        CHECK(std::abs(trapezoid_mean(f.v, 65) - mv0) < 1e-10 * T);
    }

    // Mirror a field through its right and top edges. The doubled grid's
    // solution must restrict to the original one and stay symmetric, i.e. the
    // centred normal difference across the original boundary vanishes.
    const int n = 33, N2 = 2 * n - 1;
    const Field2D small = random_field(n, 16.0, 21);
    Field2D big(N2, 32.0);
    for (int j = 0; j < N2; ++j)
        for (int i = 0; i < N2; ++i) {
            const int si = i < n ? i : N2 - 1 - i, sj = j < n ? j : N2 - 1 - j;
            big.u[big.index(i, j)] = small.u[small.index(si, sj)];
            big.v[big.index(i, j)] = small.v[small.index(si, sj)];
        }
    const ModelSpec model = diffusion_only(5.0, 0.0);
    Integrator a(model, small, 0.1, 0.0, true), b(model, big, 0.1, 0.0, true);
    for (int snap = 1; snap <= 5; ++snap) {
        for (int s = 0; s < 20; ++s) {
            REQUIRE(a.step());
            REQUIRE(b.step());
        }
        const Field2D fa = a.field(), fb = b.field();
        double amp = 0.0, normal = 0.0, restrict_err = 0.0;
        for (int c = 0; c < 2; ++c) {
            const auto& wa = fa.component(c);
            const auto& wb = fb.component(c);
            const double mean = trapezoid_mean(wa, n);
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i) {
                    amp = std::max(amp, std::abs(wa[fa.index(i, j)] - mean));
                    restrict_err = std::max(restrict_err, std::abs(wa[fa.index(i, j)] - wb[fb.index(i, j)]));
                }
            for (int j = 0; j < n; ++j) {
                normal = std::max(normal, std::abs(wb[fb.index(n, j)] - wb[fb.index(n - 2, j)]));
                normal = std::max(normal, std::abs(wb[fb.index(j, n)] - wb[fb.index(j, n - 2)]));
            }
        }
        CAPTURE(snap);
        CHECK(normal < 1e-8 * amp);
        CHECK(restrict_err < 1e-8 * amp);
    }
}

TEST_CASE("uniform steady state is a fixed point") {
    for (const char* preset : {"kgs:hexagon", "vh2:hexagon"}) {
        PresetOverrides ov;
        ov.n_grid = 64;
        const PreparedRun run = prepare_preset(preset, ov);
        Field2D f(64, run.cfg.L);
        std::fill(f.u.begin(), f.u.end(), run.background.u);
        std::fill(f.v.begin(), f.v.end(), run.background.v);
        const Field2D g = advance(run.model, f, 0.1, run.cfg.mu, 100.0);
        double drift = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i)
            drift = std::max({drift, std::abs(g.u[i] - run.background.u), std::abs(g.v[i] - run.background.v)});
        CHECK(drift < 1e-10);
    }
}

TEST_CASE("second order in time") {
    PresetOverrides ov;
    ov.n_grid = 128;
    const PreparedRun run = prepare_preset("kgs:hexagon", ov);
    const Field2D init = initial_field(run);
    const double dt = 0.1, T = 10.0;
    const Field2D ref = advance(run.model, init, dt / 8, run.cfg.mu, T);
    const double e1 = max_diff(advance(run.model, init, dt, run.cfg.mu, T), ref);
    const double e2 = max_diff(advance(run.model, init, dt / 2, run.cfg.mu, T), ref);
    CHECK(e1 / e2 >= 3.6);
    CHECK(e1 / e2 <= 4.4);
}

TEST_CASE("measured growth rates follow the dispersion relation") {
    const PreparedRun run = prepare_preset("kgs:hexagon");
    const ModelSpec& model = run.model;
    const double k = run.tp.k;
    const int s = run.tp.eps_side;
    // the fold sits 2.3e-3 below mu*, so the unstable probe stays closer
    const SteadyState unstable = continue_branch(model, run.tp.state, run.tp.mu() - s * 1e-3);
    const SteadyState stable = continue_branch(model, run.tp.state, run.tp.mu() + s * 0.02);
    struct Probe {
        const SteadyState* st;
        double k;
        int sign;
    };
    for (const Probe& p : {Probe{&unstable, k, +1}, Probe{&stable, k, -1}, Probe{&unstable, k / 4, -1}}) {
        const GrowthMeasurement g = linear_growth_check(model, *p.st, p.k);
        const double want = max_growth_rate(model, *p.st, p.k);
        CAPTURE(p.k);
        CAPTURE(want);
        CHECK(std::abs(g.rate - want) < 0.05 * std::abs(want));
        CHECK((g.rate > 0 ? 1 : -1) == p.sign);
    }
    CHECK_THROWS_AS(linear_growth_check(model, stable, 0.0), InputError);
}

TEST_CASE("blow-up stops the run with the last good state") {
    const ModelSpec model("explode", parse("-u * u", {}), parse("0 * v", {}), 2.0, 0.0, {});
    Field2D init(64, 10.0);
    std::fill(init.u.begin(), init.u.end(), 2.0);
    std::fill(init.v.begin(), init.v.end(), 0.0);
    SimConfig cfg;
    cfg.dt = 0.01;
    cfg.t_end = 10.0;
    cfg.n_grid = 64;
    cfg.L = 10.0;
    const SimResult r = run(model, init, cfg);
    CHECK(r.aborted);
    CHECK_FALSE(r.abort_reason.empty());
    CHECK(r.final.finite());
    CHECK(r.t_final < 0.6);   // u = 2 / (1 - 2 t) leaves bounds before t = 1/2
    CHECK(r.t_final > 0.4);
}

TEST_CASE("snapshots arrive in order at the nearest step") {
    PresetOverrides ov;
    ov.n_grid = 64;
    PreparedRun prep = prepare_preset("kgs:hexagon", ov);
    prep.cfg.t_end = 2.0;
    prep.cfg.dt = 0.3;
    prep.cfg.snapshot_times = {0.0, 0.5, 1.0, 2.0};
    std::vector<double> seen;
    const SimResult r = run(prep.model, initial_field(prep), prep.cfg, [&](double t, const Field2D& f) {
        seen.push_back(t);
        CHECK(f.finite());
    });
    CHECK_FALSE(r.aborted);
    REQUIRE(seen.size() == 4);
    CHECK(seen[0] == 0.0);
    CHECK(seen[1] == doctest::Approx(0.6));
    CHECK(seen[2] == doctest::Approx(0.9));
    CHECK(seen[3] >= 1.8);
    CHECK(seen == r.snapshot_times);

    SimConfig bad = prep.cfg;
    bad.snapshot_times = {3.0};
    CHECK_THROWS_AS(run(prep.model, initial_field(prep), bad), InputError);
    bad = prep.cfg;
    bad.dt = 0.0;
    CHECK_THROWS_AS(run(prep.model, initial_field(prep), bad), InputError);
}
