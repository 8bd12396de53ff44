#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dihedral/localform.hpp"
#include "dihedral/matching.hpp"
#include "dihedral/model.hpp"
#include "dihedral/profile.hpp"
#include "dihedral/sim.hpp"
#include "dihedral/turing.hpp"

namespace dihedral {

struct ModelPreset {
    std::string id;              // kgs, logistic, gilad, vh1, vh2
    std::string model;           // builtin model name
    int turing_index = 0;        // which Turing point of the scan, in increasing mu
    double amplitude = 1.0;      // C
    std::vector<double> schedule;
};

struct PatternPreset {
    std::string id;              // hexagon, square, pentagon
    int m = 6, N = 2;
    std::vector<double> seed;    // published three-digit coefficients
};

const std::vector<ModelPreset>& model_presets();
const std::vector<PatternPreset>& pattern_presets();
const ModelPreset& model_preset(const std::string& id);
const PatternPreset& pattern_preset(const std::string& id);

/// sign(P1) k^2 / (64 |P1|): the envelope exp(-sqrt(P1 eps) r) then decays
/// over 8/k, about 1.3 wavelengths.
double default_eps(const TuringPoint& tp, const Predictors& pred);

/// Turing point number `index` (in increasing mu) from a default scan.
TuringPoint select_turing_point(const ModelSpec& model, int index);

struct PresetOverrides {
    std::optional<int> n_grid;
    std::optional<double> dt, t_end, eps, C, L;
    std::optional<int> eps_sign;
    std::optional<std::vector<double>> schedule;
    bool parallel = true;
};

/// Everything needed to start a preset simulation.
struct PreparedRun {
    std::string preset;
    ModelSpec model;
    TuringPoint tp;
    LocalForm lf;
    Predictors pred;
    PatternSpec pattern;
    SimConfig cfg;
    SteadyState background;      // uniform state at cfg.mu on the Turing branch
};

/// A run described by hand instead of by preset names.
struct RunRequest {
    std::string label;
    ModelSpec model;
    int turing_index = 0;
    PatternKind kind = PatternKind::spotA;
    int m = 6, N = 2;
    std::vector<double> seed;    // Newton start for the matching condition
    double amplitude = 1.0;
    std::vector<double> schedule;
};

/// Throws InputError when P1 * eps <= 0.
PreparedRun prepare_run(const RunRequest& req, const PresetOverrides& ov = {});

/// `spec` is "<model>:<pattern>", e.g. "kgs:hexagon". Throws InputError for
/// unknown names or P1 * eps <= 0.
PreparedRun prepare_preset(const std::string& spec, const PresetOverrides& ov = {});

/// Initial field for a prepared run (spot A or ring).
Field2D initial_field(const PreparedRun& run, bool force_ring = false);

}  // namespace dihedral
