#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "dihedral/equilibria.hpp"
#include "dihedral/model.hpp"

namespace dihedral {

struct TuringPoint {
    SteadyState state;              // at mu*
    double k = 0.0;                 // critical wave number
    double discriminant_residual = 0.0;
    int eps_side = 0;               // sigma(.; mu* + eps_side*delta) has no real roots
    double side_delta = 0.0;        // probe offset actually used for eps_side
    bool repeated_negative_root = false;
    bool sides_verified = false;    // real/complex root structure checked on both sides

    double mu() const { return state.mu; }
    double wavelength() const;
};

/// 4 f_v g_u + (f_u - g_v)^2, i.e. tr^2 - 4 det of M = J(f, g).
double turing_discriminant(const Mat2& M);
double turing_discriminant(const ModelSpec& model, const SteadyState& s);

/// sigma(lambda) = det(lambda I - M) at the state.
double sigma(const ModelSpec& model, const SteadyState& s, double lambda);

/// Roots of sigma ordered by real part.
std::array<std::complex<double>, 2> sigma_roots(const ModelSpec& model, const SteadyState& s);

struct TuringOptions {
    double side_rel_delta = 1e-4;   // delta = side_rel_delta * max(1, |mu*|)
    int max_expansions = 40;        // geometric bracket growth from the guess
};

/// Classifies a steady state at which sigma has a repeated root (k, sides,
/// residual). Throws NotTuringPointError when k^2 <= 0.
TuringPoint classify_turing_point(const ModelSpec& model, const SteadyState& s, const TuringOptions& opt = {});

/// Finds the Turing point on the branch through (mu_guess, state_guess).
TuringPoint find_turing_point(const ModelSpec& model, double mu_guess, Vec2 state_guess,
                              const TuringOptions& opt = {});

/// Temporal eigenvalues omega of the linearized time-dependent system at wave
/// number k_perturb, with the full diffusion matrix [[1, 0], [-D_v beta, D_v]].
std::array<std::complex<double>, 2> growth_rates(const ModelSpec& model, const SteadyState& s, double k_perturb);

double max_growth_rate(const ModelSpec& model, const SteadyState& s, double k_perturb);

struct TuringScanOptions {
    double mu_lo = 0.05, mu_hi = 10.0;
    int samples = 400;              // geometric spacing when mu_lo > 0, uniform otherwise
    int seed_levels = 6;            // number of mu values seeded with the lattice
    SteadyOptions steady{4.0, 4.0, 7, true, 1e-6};
    TuringOptions turing;
};

struct RejectedCandidate {
    SteadyState state;
    bool belyakov_devaney = false;
    std::string reason;
};

struct TuringScan {
    std::vector<TuringPoint> points;        // sorted by mu
    std::vector<RejectedCandidate> rejected;
};

/// Traces every steady branch found over [mu_lo, mu_hi] and collects all
/// repeated-root points, classified.
TuringScan scan_turing_points(const ModelSpec& model, const TuringScanOptions& opt = {});

}  // namespace dihedral
