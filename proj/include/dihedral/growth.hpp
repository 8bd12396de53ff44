#pragma once

#include <array>
#include <complex>

#include "dihedral/equilibria.hpp"
#include "dihedral/model.hpp"

namespace dihedral {

struct GrowthOptions {
    int n_grid = 128;
    int half_waves = 2;        // L = half_waves * pi / k_perturb, so cos(k x) obeys the Neumann condition
    double dt = 0.05;
    double t_short = 40.0;
    double amplitude = 1e-6;
    double fit_tol = 1e-6;     // relative |P(t) - P(t/2)^2| treated as nonlinear contamination
    int min_window_steps = 8;
    bool parallel = true;
};

struct GrowthMeasurement {
    std::array<std::complex<double>, 2> omega{};   // log(eig P(window)) / window
    double rate = 0.0;                             // max Re omega
    double fit_residual = 0.0;
    double window = 0.0;                           // length of the window finally used
    int shortened = 0;                             // windows halved because of misfit
};

/// Perturbs the uniform state `s` by cos(k x) in u, and separately in v, and
/// records the 2x2 propagator P(t) of the (u, v) mode amplitudes. The rates
/// of P over the window are comparable with growth_rates(model, s, k_perturb).
GrowthMeasurement linear_growth_check(const ModelSpec& model, const SteadyState& s, double k_perturb,
                                      const GrowthOptions& opt = {});

}  // namespace dihedral
