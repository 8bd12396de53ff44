#include "dihedral/presets.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dihedral/error.hpp"

namespace dihedral {

namespace {

std::vector<double> every_100(double from, double to) {
    std::vector<double> t;
    for (double x = from; x <= to + 1e-9; x += 100.0) t.push_back(x);
    return t;
}

}  // namespace

const std::vector<ModelPreset>& model_presets() {
    // vh1 starts from very weak deviations, so it uses a larger amplitude.
    static const std::vector<ModelPreset> p = {
        {"kgs", "kgs", 0, 1.0, every_100(100, 500)},
        {"logistic", "logistic_klausmeier", 0, 1.0, every_100(100, 500)},
        {"gilad", "nfc_gilad", 0, 1.0, every_100(100, 500)},
        {"vh1", "von_hardenberg", 0, 4.0, every_100(200, 600)},
        {"vh2", "von_hardenberg", 1, 1.0, every_100(200, 600)},
    };
    return p;
}

const std::vector<PatternPreset>& pattern_presets() {
    static const std::vector<PatternPreset> p = {
        {"hexagon", 6, 2, {0.311, 0.267, 0.189}},
        {"square", 4, 5, {-0.136, 0.262, 0.236, -0.114, 0.187, 0.145}},
        {"pentagon", 5, 3, {-0.382, 0.300, 0.382, 0.486}},
    };
    return p;
}

const ModelPreset& model_preset(const std::string& id) {
    for (const auto& p : model_presets())
        if (p.id == id) return p;
    throw InputError("unknown model preset '" + id + "' (kgs, logistic, gilad, vh1, vh2)");
}

const PatternPreset& pattern_preset(const std::string& id) {
    for (const auto& p : pattern_presets())
        if (p.id == id) return p;
    throw InputError("unknown pattern preset '" + id + "' (hexagon, square, pentagon)");
}

double default_eps(const TuringPoint& tp, const Predictors& pred) {
    const double k2 = tp.k * tp.k;
    return std::copysign(k2 / (64.0 * std::abs(pred.P1)), pred.P1);
}

TuringPoint select_turing_point(const ModelSpec& model, int index) {
    const TuringScan scan = scan_turing_points(model);
    if (index < 0 || index >= static_cast<int>(scan.points.size()))
        throw NumericalError(model.name() + ": Turing point " + std::to_string(index + 1) + " not found (scan found " +
                             std::to_string(scan.points.size()) + ")");
    return scan.points[static_cast<std::size_t>(index)];
}

PreparedRun prepare_run(const RunRequest& req, const PresetOverrides& ov) {
    const ModelSpec& model = req.model;
    const TuringPoint tp = select_turing_point(model, req.turing_index);
    const LocalForm lf = build_local_form(model, tp);
    const Predictors pred = predictors(lf);

    PatternSpec pattern;
    pattern.kind = req.kind;
    pattern.matching = solve_matching(req.kind, req.m, req.N, req.seed);
    pattern.amplitude = ov.C.value_or(req.amplitude);
    double eps = ov.eps.value_or(default_eps(tp, pred));
    if (ov.eps_sign) {
        if (*ov.eps_sign != 1 && *ov.eps_sign != -1) throw InputError("eps sign must be +1 or -1");
        eps = *ov.eps_sign * std::abs(eps);
    }
    if (!(pred.P1 * eps > 0.0))
        throw InputError("P1 * eps must be positive: P1 = " + format_double(pred.P1) + ", eps = " + format_double(eps));
    pattern.eps = eps;

    SimConfig cfg;
    cfg.dt = ov.dt.value_or(0.1);
    cfg.n_grid = ov.n_grid.value_or(128);
    cfg.L = ov.L.value_or(20.0 * 2.0 * std::numbers::pi / tp.k);
    cfg.snapshot_times = ov.schedule.value_or(req.schedule);
    std::sort(cfg.snapshot_times.begin(), cfg.snapshot_times.end());
    cfg.t_end = ov.t_end.value_or(cfg.snapshot_times.empty() ? 0.0 : cfg.snapshot_times.back());
    std::erase_if(cfg.snapshot_times, [&](double t) { return t > cfg.t_end + 1e-9; });
    cfg.mu = tp.mu() + eps;
    cfg.parallel = ov.parallel;

    const SteadyState bg = continue_branch(model, tp.state, cfg.mu);
    return PreparedRun{req.label, model, tp, lf, pred, std::move(pattern), cfg, bg};
}

PreparedRun prepare_preset(const std::string& spec, const PresetOverrides& ov) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) throw InputError("preset must look like <model>:<pattern>, got '" + spec + "'");
    const ModelPreset& mp = model_preset(spec.substr(0, colon));
    const PatternPreset& pp = pattern_preset(spec.substr(colon + 1));
    const RunRequest req{spec, builtin_model(mp.model), mp.turing_index, PatternKind::spotA, pp.m, pp.N, pp.seed,
                         mp.amplitude, mp.schedule};
    return prepare_run(req, ov);
}

Field2D initial_field(const PreparedRun& run, bool force_ring) {
    const GridSpec grid{run.cfg.n_grid, run.cfg.L};
    if (run.pattern.kind == PatternKind::spotA) return spotA_field(run.tp, run.pred, run.pattern, grid);
    return ring_field(run.tp, run.lf, run.pattern, grid, force_ring);
}

}  // namespace dihedral
