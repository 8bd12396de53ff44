#include "dihedral/profile.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "dihedral/bessel.hpp"
#include "dihedral/error.hpp"

namespace dihedral {

Field2D::Field2D(int n_grid, double length) : n(n_grid), L(length), u(size()), v(size()) {
    if (n_grid < 2) throw InputError("grid needs at least 2 points per side");
    if (!(length > 0.0) || !std::isfinite(length)) throw InputError("domain length must be positive");
}

double Field2D::sample(int c, double x, double y) const {
    const std::vector<double>& f = component(c);
    const double hh = h();
    const double px = std::clamp((x + 0.5 * L) / hh, 0.0, n - 1.0);
    const double py = std::clamp((y + 0.5 * L) / hh, 0.0, n - 1.0);
    const int i = std::min(static_cast<int>(px), n - 2), j = std::min(static_cast<int>(py), n - 2);
    const double tx = px - i, ty = py - j;
    return (1 - tx) * (1 - ty) * f[index(i, j)] + tx * (1 - ty) * f[index(i + 1, j)] +
           (1 - tx) * ty * f[index(i, j + 1)] + tx * ty * f[index(i + 1, j + 1)];
}

bool Field2D::finite() const {
    auto ok = [](const std::vector<double>& f) { return std::all_of(f.begin(), f.end(), [](double x) { return std::isfinite(x); }); };
    return ok(u) && ok(v);
}

namespace {

void check_pattern(const PatternSpec& spec, PatternKind want, double P1, const GridSpec& grid) {
    if (spec.kind != want || spec.matching.kind != want)
        throw InputError(std::string("pattern kind mismatch: expected ") + kind_name(want));
    if (spec.matching.coeffs.size() != static_cast<std::size_t>(spec.matching.N + 1))
        throw InputError("matching solution has the wrong number of coefficients");
    if (!(P1 * spec.eps > 0.0))
        throw InputError("P1 * eps must be positive (P1 = " + format_double(P1) + ", eps = " + format_double(spec.eps) + ")");
    if (!(spec.amplitude > 0.0)) throw InputError("pattern amplitude must be positive");
    if (grid.n < 2 || !(grid.L > 0.0)) throw InputError("grid needs n >= 2 and L > 0");
    if (spec.matching.m * spec.matching.N + 1 > kMaxBesselOrder)
        throw InputError("m * N too large for the Bessel evaluator");
}

// Calls body(i, j, r, theta) for every node; rows go to OpenMP threads.
template <class Body>
void for_each_node(const Field2D& f, Body&& body) {
#pragma omp parallel for schedule(static)
    for (int j = 0; j < f.n; ++j) {
        const double y = f.coord(j);
        for (int i = 0; i < f.n; ++i) {
            const double x = f.coord(i);
            body(i, j, std::hypot(x, y), std::atan2(y, x));
        }
    }
}

}  // namespace

Field2D spotA_field(const TuringPoint& tp, const Predictors& pred, const PatternSpec& spec, const GridSpec& grid) {
    check_pattern(spec, PatternKind::spotA, pred.P1, grid);
    const int m = spec.matching.m, N = spec.matching.N;
    const std::vector<double>& a = spec.matching.coeffs;
    const double decay = std::sqrt(pred.P1 * spec.eps);
    const double scale = spec.amplitude * pred.P3;
    Field2D f(grid.n, grid.L);
    for_each_node(f, [&](int i, int j, double r, double th) {
        double J[kMaxBesselOrder + 1];
        bessel_j_all(m * N, tp.k * r, std::span<double>(J, static_cast<std::size_t>(m * N + 1)));
        double S = a[0] * J[0];
        for (int n = 1; n <= N; ++n) S += 2.0 * a[static_cast<std::size_t>(n)] * J[m * n] * std::cos(m * n * th);
        const double dev = scale * S * std::exp(-decay * r);
        f.u[f.index(i, j)] = tp.state.u + dev;
        f.v[f.index(i, j)] = tp.state.v + pred.P2 * dev;
    });
    return f;
}

Field2D ring_field(const TuringPoint& tp, const LocalForm& lf, const PatternSpec& spec, const GridSpec& grid, bool force) {
    check_pattern(spec, PatternKind::ring, lf.c0, grid);
    if (!(lf.c3 < 0.0) && !force)
        throw NumericalError("ring patterns need P4 < 0 (P4 = " + format_double(lf.c3) + "); use force to override");
    const int m = spec.matching.m, N = spec.matching.N;
    const std::vector<double>& b = spec.matching.coeffs;
    const double c0e = lf.c0 * spec.eps;
    const double scale = spec.amplitude * std::pow(c0e, 0.75);
    const double decay = std::sqrt(c0e);
    const int top = m * N + 1;
    Field2D f(grid.n, grid.L);
    for_each_node(f, [&](int i, int j, double r, double th) {
        double J[kMaxBesselOrder + 1];
        const double kr = tp.k * r;
        bessel_j_all(top, kr, std::span<double>(J, static_cast<std::size_t>(top + 1)));
        // n and -n share cos(m n theta); |mn + 1| and |m(-n) + 1| = mn - 1.
        double A = b[0] * kr * J[1], B = 2.0 * b[0] * J[0];
        for (int n = 1; n <= N; ++n) {
            const double c = std::cos(m * n * th) * b[static_cast<std::size_t>(n)];
            A += c * kr * (J[m * n + 1] + J[std::abs(m * n - 1)]);
            B += 4.0 * c * J[m * n];
        }
        const double env = scale * std::exp(-decay * r);
        f.u[f.index(i, j)] = tp.state.u + env * (A * lf.U0[0] + B * lf.U1[0]);
        f.v[f.index(i, j)] = tp.state.v + env * (A * lf.U0[1] + B * lf.U1[1]);
    });
    return f;
}

double dihedral_symmetry_error(const Field2D& field, int m, const SymmetryProbe& probe) {
    if (m < 1) throw InputError("dihedral index m must be >= 1");
    const double rmax = probe.radius_fraction * 0.5 * field.L;
    const double rot = 2.0 * std::numbers::pi / m;
    double err = 0.0;
    for (int c = 0; c < 2; ++c)
        for (int ir = 0; ir < probe.radii; ++ir) {
            const double r = probe.radii == 1 ? 0.0 : rmax * ir / (probe.radii - 1);
            for (int it = 0; it < probe.angles; ++it) {
                const double t = 2.0 * std::numbers::pi * it / probe.angles;
                const double base = field.sample(c, r * std::cos(t), r * std::sin(t));
                const double turned = field.sample(c, r * std::cos(t + rot), r * std::sin(t + rot));
                const double mirrored = field.sample(c, r * std::cos(t), -r * std::sin(t));
                err = std::max({err, std::abs(base - turned), std::abs(base - mirrored)});
            }
        }
    return err;
}

}  // namespace dihedral
