#pragma once

#include <cstddef>
#include <vector>

#include "dihedral/localform.hpp"
#include "dihedral/matching.hpp"
#include "dihedral/turing.hpp"

namespace dihedral {

/// Two scalar fields on an n x n node grid covering [-L/2, L/2]^2, centred on
/// the polar origin. Storage is row-major: index j * n + i has x = x(i), y = x(j).
struct Field2D {
    int n = 0;
    double L = 0.0;
    std::vector<double> u, v;

    Field2D() = default;
    Field2D(int n_grid, double length);

    double h() const { return L / (n - 1); }
    double coord(int i) const { return -0.5 * L + i * h(); }
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * n + i; }
    std::size_t size() const { return static_cast<std::size_t>(n) * n; }
    const std::vector<double>& component(int c) const { return c == 0 ? u : v; }
    std::vector<double>& component(int c) { return c == 0 ? u : v; }

    /// Bilinear interpolation of component c at (x, y); clamps to the domain.
    double sample(int c, double x, double y) const;
    bool finite() const;
};

struct GridSpec {
    int n = 128;
    double L = 0.0;
};

struct PatternSpec {
    PatternKind kind = PatternKind::spotA;
    MatchingSolution matching;
    double eps = 0.0;          // mu - mu*; P1 * eps must be positive
    double amplitude = 1.0;    // C for spot A, C_R for rings
};

/// (u*, v*) + C P3 S(r, theta) exp(-sqrt(P1 eps) r) (1, P2), with
/// S = sum_{n=-N}^{N} a_|n| J_|mn|(k r) cos(m n theta).
Field2D spotA_field(const TuringPoint& tp, const Predictors& pred, const PatternSpec& spec, const GridSpec& grid);

/// Leading-order ring profile
/// C_R (c0 eps)^{3/4} sum b_|n| [k r J_|mn+1|(k r) U0 + 2 J_|mn|(k r) U1] cos(m n theta),
/// damped by exp(-sqrt(c0 eps) r) in place of the far field. Rings need c3 < 0;
/// otherwise NumericalError unless `force`.
Field2D ring_field(const TuringPoint& tp, const LocalForm& lf, const PatternSpec& spec, const GridSpec& grid,
                   bool force = false);

struct SymmetryProbe {
    double radius_fraction = 0.9;   // probes cover r <= radius_fraction * L/2
    int radii = 60;
    int angles = 73;
};

/// Max over probes of |U(r, t) - U(r, t + 2 pi/m)| and |U(r, t) - U(r, -t)|
/// for both components, using bilinear interpolation.
double dihedral_symmetry_error(const Field2D& field, int m, const SymmetryProbe& probe = {});

}  // namespace dihedral
