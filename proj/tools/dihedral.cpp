#include <omp.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dihedral/config.hpp"
#include "dihedral/error.hpp"
#include "dihedral/field_io.hpp"
#include "dihedral/kgs_oracle.hpp"
#include "dihedral/localform.hpp"
#include "dihedral/manifest.hpp"
#include "dihedral/matching.hpp"
#include "dihedral/metrics.hpp"
#include "dihedral/presets.hpp"
#include "dihedral/report.hpp"
#include "dihedral/sim.hpp"
#include "dihedral/turing.hpp"

namespace fs = std::filesystem;
using namespace dihedral;

namespace {

struct ModelArgs {
    std::string source = "kgs";
    std::vector<std::string> sets;
};

void add_model_options(CLI::App* cmd, ModelArgs& m) {
    cmd->add_option("--model", m.source, "builtin model name or model config file")->capture_default_str();
    cmd->add_option("--set", m.sets, "parameter override key=value (repeatable)");
}

std::map<std::string, double> parse_sets(const std::vector<std::string>& sets) {
    std::map<std::string, double> out;
    for (const auto& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0) throw InputError("--set expects key=value, got '" + s + "'");
        out[s.substr(0, eq)] = parse_number(s.substr(eq + 1), "--set " + s.substr(0, eq));
    }
    return out;
}

ModelSpec load_model(const ModelArgs& m) { return resolve_model(m.source, parse_sets(m.sets)); }

struct PointArgs {
    std::optional<double> mu_guess;
    std::vector<double> state_guess;
    int index = 1;
    double mu_lo = TuringScanOptions{}.mu_lo, mu_hi = TuringScanOptions{}.mu_hi;
    int samples = TuringScanOptions{}.samples;
};

void add_point_options(CLI::App* cmd, PointArgs& p) {
    cmd->add_option("--mu-guess", p.mu_guess, "pick the Turing point nearest this mu");
    cmd->add_option("--state-guess", p.state_guess, "u,v near the Turing point (with --mu-guess: skip the scan)")
        ->delimiter(',')
        ->expected(2);
    cmd->add_option("--index", p.index, "Turing point number in increasing mu (1-based)")->capture_default_str();
    cmd->add_option("--mu-lo", p.mu_lo, "scan range start")->capture_default_str();
    cmd->add_option("--mu-hi", p.mu_hi, "scan range end")->capture_default_str();
    cmd->add_option("--samples", p.samples, "scan samples")->capture_default_str();
}

TuringPoint pick_turing_point(const ModelSpec& model, const PointArgs& p) {
    if (p.mu_guess && p.state_guess.size() == 2)
        return find_turing_point(model, *p.mu_guess, {p.state_guess[0], p.state_guess[1]});
    TuringScanOptions opt;
    opt.mu_lo = p.mu_lo;
    opt.mu_hi = p.mu_hi;
    opt.samples = p.samples;
    const TuringScan scan = scan_turing_points(model, opt);
    if (scan.points.empty()) {
        std::string why = "no Turing point found for mu in [" + format_double(p.mu_lo) + ", " + format_double(p.mu_hi) + "]";
        for (const auto& r : scan.rejected) why += "\n  rejected mu = " + format_double(r.state.mu) + ": " + r.reason;
        throw NumericalError(why);
    }
    if (p.mu_guess) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < scan.points.size(); ++i)
            if (std::abs(scan.points[i].mu() - *p.mu_guess) < std::abs(scan.points[best].mu() - *p.mu_guess)) best = i;
        return scan.points[best];
    }
    if (p.index < 1 || p.index > static_cast<int>(scan.points.size()))
        throw InputError("--index " + std::to_string(p.index) + " out of range: found " + std::to_string(scan.points.size()) +
                         " Turing point(s)");
    return scan.points[static_cast<std::size_t>(p.index - 1)];
}

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path.string());
    return out;
}

// ---------------------------------------------------------------------------

int cmd_steady(const ModelArgs& ma, double mu, const std::vector<double>& guess) {
    const ModelSpec model = load_model(ma);
    SteadySearch found;
    if (guess.size() == 2) {
        const auto s = solve_steady(model, mu, {guess[0], guess[1]});
        if (s) found.states.push_back(*s);
    } else {
        found = find_steady_states(model, mu, {});
    }
    if (found.states.empty()) throw NumericalError("no steady state found at mu = " + format_double(mu));
    std::cout << "u,v,mu,residual,turing_discriminant\n";
    for (const auto& s : found.states)
        std::cout << format_double(s.u) << ',' << format_double(s.v) << ',' << format_double(s.mu) << ','
                  << format_double(s.residual) << ',' << format_double(turing_discriminant(model, s)) << '\n';
    return 0;
}

int cmd_turing(const ModelArgs& ma, const PointArgs& pa, const std::string& dispersion, double kmax_factor, int kpoints) {
    const ModelSpec model = load_model(ma);
    const TuringPoint tp = pick_turing_point(model, pa);
    std::cout << "model " << model.name() << "\n" << format_turing_report(tp);
    if (!dispersion.empty()) {
        std::ofstream out = open_out(dispersion);
        out << "k,re_omega_max\n";
        for (const auto& d : dispersion_curve(model, tp.state, kmax_factor * tp.k, kpoints))
            out << format_double(d.k) << ',' << format_double(d.rate) << '\n';
        std::cout << "dispersion curve written to " << dispersion << "\n";
    }
    return 0;
}

int cmd_predict(const ModelArgs& ma, const PointArgs& pa) {
    const ModelSpec model = load_model(ma);
    const TuringPoint tp = pick_turing_point(model, pa);
    const Predictors p = predictors(build_local_form(model, tp));
    std::cout << "model " << model.name() << " at mu* = " << format_double(tp.mu()) << "\n" << format_predictor_report(p);
    return 0;
}

int cmd_analyze(const ModelArgs& ma, const PointArgs& pa, const std::string& csv) {
    const ModelSpec model = load_model(ma);
    const TuringPoint tp = pick_turing_point(model, pa);
    const LocalForm lf = build_local_form(model, tp);
    const Predictors p = predictors(lf);
    std::cout << "[model]\n" << model.describe() << "\n\n[turing]\n" << format_turing_report(tp) << "\n[localform]\n"
              << format_local_form_report(lf) << "\n[predictors]\n" << format_predictor_report(p);
    if (!csv.empty()) {
        std::ofstream out = open_out(csv);
        out << "key,value\n";
        auto row = [&](const char* k, double v) { out << k << ',' << format_double(v) << '\n'; };
        row("mu_star", tp.mu());
        row("u_star", tp.state.u);
        row("v_star", tp.state.v);
        row("k", tp.k);
        row("wavelength", tp.wavelength());
        row("eps_side", tp.eps_side);
        row("gamma", lf.gamma);
        row("c0", lf.c0);
        row("c3", lf.c3);
        row("P1", p.P1);
        row("P2", p.P2);
        row("P3", p.P3);
        row("P4", p.P4);
    }
    return 0;
}

struct MapArgs {
    std::string x = "delta_v", y = "m";
    std::vector<double> xr{0.5, 20.0}, yr{0.1, 2.0};
    int nx = 40, ny = 40;
    std::string out;
    bool closed = false;
    bool serial = false;
};

int cmd_p4map(const ModelArgs& ma, const MapArgs& a) {
    const ModelSpec family = load_model(ma);
    if (a.closed && family.name() != "kgs") throw InputError("--closed-form is only available for the kgs model");
    const ParamAxis xa{a.x, a.xr[0], a.xr[1], a.nx}, ya{a.y, a.yr[0], a.yr[1], a.ny};
    const SignMap map = p4_sign_map(family, xa, ya, {}, !a.serial);

    std::ofstream file;
    if (!a.out.empty()) file = open_out(a.out);
    std::ostream& os = a.out.empty() ? std::cout : file;
    os << a.x << ',' << a.y << ",class,P4,mu_star" << (a.closed ? ",closed_class" : "") << '\n';
    int mismatches = 0;
    for (const auto& c : map.cells) {
        os << format_double(c.x) << ',' << format_double(c.y) << ',' << p4_class_name(c.cls) << ',' << format_double(c.P4)
           << ',' << format_double(c.mu_star);
        if (a.closed) {
            const double m = a.x == "m" ? c.x : c.y, dv = a.x == "m" ? c.y : c.x;
            const KgsClosedForm cf = kgs_closed_form(m, dv);
            const P4Class cc = !cf.turing ? P4Class::no_turing : (cf.P4 < 0.0 ? P4Class::p4_negative : P4Class::p4_positive);
            if (cc != c.cls) ++mismatches;
            os << ',' << p4_class_name(cc);
        }
        os << '\n';
    }
    if (a.closed) std::cerr << mismatches << " cell(s) differ from the closed-form classification\n";
    return 0;
}

struct MatchArgs {
    std::string kind = "spotA";
    int m = 6, N = 2;
    int trials = 500;
    std::uint64_t seed = 42;
    std::vector<double> start;
    std::string out;
    bool serial = false;
};

int cmd_match(const MatchArgs& a) {
    const PatternKind kind = parse_kind(a.kind);
    std::vector<MatchingSolution> sols;
    if (!a.start.empty()) {
        if (static_cast<int>(a.start.size()) != a.N + 1)
            throw InputError("--start needs N + 1 = " + std::to_string(a.N + 1) + " coefficients");
        sols.push_back(solve_matching(kind, a.m, a.N, a.start));
    } else {
        MultistartOptions opt;
        opt.trials = a.trials;
        opt.seed = a.seed;
        opt.parallel = !a.serial;
        sols = multistart(kind, a.m, a.N, opt);
    }
    std::ofstream file;
    if (!a.out.empty()) file = open_out(a.out);
    std::ostream& os = a.out.empty() ? std::cout : file;
    os << "kind,m,N";
    for (int n = 0; n <= a.N; ++n) os << ',' << (kind == PatternKind::spotA ? "a" : "b") << n;
    os << ",residual,jac_min_sv,iterations\n";
    for (const auto& s : sols) {
        os << kind_name(s.kind) << ',' << s.m << ',' << s.N;
        for (double c : s.coeffs) os << ',' << format_double(c);
        os << ',' << format_double(s.residual) << ',' << format_double(s.jac_min_sv) << ',' << s.iterations << '\n';
    }
    if (sols.empty()) std::cerr << "no nondegenerate solution found\n";
    return 0;
}

struct RunArgs {
    std::string preset;
    std::string manifest;
    ModelArgs model;
    bool model_given = false;
    int turing_index = 1;
    std::string kind = "spotA";
    int m = 6, N = 2;
    std::vector<double> coeffs;
    std::optional<int> ngrid;
    std::optional<double> dt, t_end, eps, C, L;
    std::optional<int> eps_sign;
    std::vector<double> schedule;
    std::string out = "run";
    bool serial = false;
    bool force = false;
};

void add_run_options(CLI::App* cmd, RunArgs& r, bool with_manifest) {
    cmd->add_option("--preset", r.preset, "<model>:<pattern>, models kgs logistic gilad vh1 vh2, patterns hexagon square pentagon");
    if (with_manifest) cmd->add_option("--manifest", r.manifest, "rerun the run recorded in this manifest");
    cmd->add_option("--model", r.model.source, "explicit run: builtin model name or model config file");
    cmd->add_option("--set", r.model.sets, "parameter override key=value (repeatable)");
    cmd->add_option("--turing-index", r.turing_index, "explicit run: Turing point number (1-based)");
    cmd->add_option("--kind", r.kind, "explicit run: spotA or ring");
    cmd->add_option("--m", r.m, "explicit run: dihedral index");
    cmd->add_option("--N", r.N, "explicit run: truncation");
    cmd->add_option("--coeffs", r.coeffs, "explicit run: Newton start for the matching coefficients")->delimiter(',');
    cmd->add_option("--ngrid", r.ngrid, "grid nodes per side");
    cmd->add_option("--dt", r.dt, "time step");
    cmd->add_option("--t-end", r.t_end, "final time");
    cmd->add_option("--eps", r.eps, "mu - mu*");
    cmd->add_option("--eps-sign", r.eps_sign, "force the sign of eps (+1 or -1)");
    cmd->add_option("--C", r.C, "pattern amplitude C");
    cmd->add_option("--L", r.L, "domain side length");
    cmd->add_option("--schedule", r.schedule, "snapshot times")->delimiter(',');
    cmd->add_option("--out", r.out, "output directory")->capture_default_str();
    cmd->add_flag("--serial", r.serial, "use the serial reference kernels");
    cmd->add_flag("--force", r.force, "allow ring profiles when P4 >= 0");
}

PreparedRun prepare(const RunArgs& r) {
    PresetOverrides ov;
    ov.n_grid = r.ngrid;
    ov.dt = r.dt;
    ov.t_end = r.t_end;
    ov.eps = r.eps;
    ov.C = r.C;
    ov.L = r.L;
    ov.eps_sign = r.eps_sign;
    if (!r.schedule.empty()) ov.schedule = r.schedule;
    ov.parallel = !r.serial;

    if (!r.manifest.empty()) {
        if (!r.preset.empty() || r.model_given) throw InputError("--manifest cannot be combined with --preset or --model");
        PreparedRun run = read_manifest(r.manifest);
        run.cfg.parallel = !r.serial;
        return run;
    }
    if (!r.preset.empty()) {
        if (r.model_given) throw InputError("use either --preset or --model, not both");
        return prepare_preset(r.preset, ov);
    }
    if (!r.model_given) throw InputError("give --preset, --model or --manifest");
    if (r.coeffs.empty()) throw InputError("an explicit run needs --coeffs");
    RunRequest req{"explicit", load_model(r.model), r.turing_index - 1, parse_kind(r.kind), r.m, r.N, r.coeffs, 1.0,
                   {100, 200, 300, 400, 500}};
    return prepare_run(req, ov);
}

std::string time_tag(double t) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "t%07.1f", t);
    return buf;
}

void print_metrics_header(std::ostream& os) { os << "t,amplitude,centre_deviation,gaps,peaks,radius,correlation\n"; }

void print_metrics(std::ostream& os, double t, const PatternMetrics& pm) {
    os << format_double(t) << ',' << format_double(pm.amplitude) << ',' << format_double(pm.centre_deviation) << ','
       << pm.gaps << ',' << pm.peaks << ',' << format_double(pm.radius) << ',' << format_double(pm.correlation) << '\n';
}

int cmd_profile(const RunArgs& r) {
    const PreparedRun run = prepare(r);
    const Field2D f = initial_field(run, r.force);
    fs::create_directories(r.out);
    write_field(r.out, "init", f);
    const PatternMetrics pm = pattern_metrics(f, run.background.u, run.background.v);
    std::cout << "pattern " << kind_name(run.pattern.kind) << " m = " << run.pattern.matching.m
              << " N = " << run.pattern.matching.N << " eps = " << format_double(run.pattern.eps)
              << " C = " << format_double(run.pattern.amplitude) << "\n"
              << "grid " << f.n << " x " << f.n << ", L = " << format_double(f.L) << "\n"
              << "amplitude = " << format_double(pm.amplitude) << "\n"
              << "centre deviation = " << format_double(pm.centre_deviation) << "\n"
              << "dihedral symmetry error = " << format_double(dihedral_symmetry_error(f, run.pattern.matching.m)) << "\n"
              << "written u_init and v_init to " << r.out << "\n";
    return 0;
}

int cmd_simulate(const RunArgs& r) {
    PreparedRun prep = prepare(r);
    const fs::path dir = r.out;
    fs::create_directories(dir);
    const Field2D init = initial_field(prep, r.force);

    std::vector<std::string> outputs;
    std::ofstream metrics = open_out(dir / "metrics.csv");
    print_metrics_header(metrics);
    auto sink = [&](double t, const Field2D& f) {
        const std::string tag = time_tag(t);
        write_field(dir, tag, f);
        for (const char* c : {"u_", "v_"})
            for (const char* ext : {".csv", ".pgm"}) outputs.push_back(std::string(c) + tag + ext);
        const PatternMetrics pm = pattern_metrics(f, prep.background.u, prep.background.v);
        print_metrics(metrics, t, pm);
        std::cout << "t = " << format_double(t) << "  gaps " << pm.gaps << "  peaks " << pm.peaks << "  radius "
                  << format_double(pm.radius) << "  corr " << format_double(pm.correlation) << std::endl;
    };
    const SimResult res = run(prep.model, init, prep.cfg, sink);
    outputs.push_back("metrics.csv");
    if (res.aborted) {
        write_field(dir, "last", res.final);
        for (const char* f : {"u_last.csv", "u_last.pgm", "v_last.csv", "v_last.pgm"}) outputs.emplace_back(f);
    }
    write_manifest(dir / "manifest.txt", prep, outputs);
    if (res.aborted)
        throw NumericalError("simulation stopped at t = " + format_double(res.t_final) + ": " + res.abort_reason);
    std::cout << "manifest written to " << (dir / "manifest.txt").string() << "\n";
    return 0;
}

int cmd_oracle_kgs(double m, double dv) {
    const OracleReport r = kgs_oracle_compare(m, dv);
    std::cout << format_oracle_report(r);
    return r.pass ? 0 : 3;
}

void apply_thread_env() {
    const char* env = std::getenv("DIHEDRAL_THREADS");
    if (!env || !*env) return;
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (*end != '\0' || n < 1 || n > 4096) throw InputError(std::string("DIHEDRAL_THREADS must be a positive integer, got '") + env + "'");
    omp_set_num_threads(static_cast<int>(n));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Turing points, pattern predictors and localized dihedral patterns for two-component reaction-diffusion models"};
    app.require_subcommand(1);

    ModelArgs steady_model;
    double steady_mu = 0.0;
    std::vector<double> steady_guess;
    auto* steady = app.add_subcommand("steady", "uniform steady states at fixed mu (CSV on stdout)");
    add_model_options(steady, steady_model);
    steady->add_option("--mu", steady_mu, "parameter value")->required();
    steady->add_option("--guess", steady_guess, "u,v Newton start instead of the lattice search")->delimiter(',')->expected(2);

    ModelArgs turing_model;
    PointArgs turing_point;
    std::string dispersion;
    double kmax_factor = 3.0;
    int kpoints = 200;
    auto* turing = app.add_subcommand("turing", "Turing point report and dispersion curve");
    add_model_options(turing, turing_model);
    add_point_options(turing, turing_point);
    turing->add_option("--dispersion", dispersion, "write (k, max Re omega) CSV here");
    turing->add_option("--kmax-factor", kmax_factor, "curve covers (0, factor * k*]")->capture_default_str();
    turing->add_option("--kpoints", kpoints, "curve samples")->capture_default_str();

    ModelArgs predict_model;
    PointArgs predict_point;
    auto* predict = app.add_subcommand("predict", "predictors P1..P4 and what their signs imply");
    add_model_options(predict, predict_model);
    add_point_options(predict, predict_point);

    ModelArgs analyze_model;
    PointArgs analyze_point;
    std::string analyze_csv;
    auto* analyze = app.add_subcommand("analyze", "full report: Turing point, local form, predictors");
    add_model_options(analyze, analyze_model);
    add_point_options(analyze, analyze_point);
    analyze->add_option("--csv", analyze_csv, "also write key,value CSV here");

    ModelArgs map_model;
    MapArgs map_args;
    auto* p4map = app.add_subcommand("p4map", "classify a 2-parameter grid by the sign of P4 (CSV)");
    add_model_options(p4map, map_model);
    p4map->add_option("--x", map_args.x, "parameter on the first axis")->capture_default_str();
    p4map->add_option("--y", map_args.y, "parameter on the second axis")->capture_default_str();
    p4map->add_option("--x-range", map_args.xr, "lo,hi")->delimiter(',')->expected(2)->capture_default_str();
    p4map->add_option("--y-range", map_args.yr, "lo,hi")->delimiter(',')->expected(2)->capture_default_str();
    p4map->add_option("--nx", map_args.nx, "cells along x")->capture_default_str();
    p4map->add_option("--ny", map_args.ny, "cells along y")->capture_default_str();
    p4map->add_option("--out", map_args.out, "CSV path (stdout if absent)");
    p4map->add_flag("--closed-form", map_args.closed, "kgs only: add the closed-form class column");
    p4map->add_flag("--serial", map_args.serial, "one thread");

    MatchArgs match_args;
    auto* match = app.add_subcommand("match", "solve the dihedral matching condition (CSV)");
    match->add_option("--kind", match_args.kind, "spotA or ring")->capture_default_str();
    match->add_option("--m", match_args.m, "dihedral index")->capture_default_str();
    match->add_option("--N", match_args.N, "truncation")->capture_default_str();
    match->add_option("--trials", match_args.trials, "random starts")->capture_default_str();
    match->add_option("--seed", match_args.seed, "random seed")->capture_default_str();
    match->add_option("--start", match_args.start, "polish one start a_0,..,a_N instead of multistart")->delimiter(',');
    match->add_option("--out", match_args.out, "CSV path (stdout if absent)");
    match->add_flag("--serial", match_args.serial, "one thread");

    RunArgs profile_args;
    auto* profile = app.add_subcommand("profile", "write the initial spot A or ring profile");
    add_run_options(profile, profile_args, false);

    RunArgs sim_args;
    auto* simulate = app.add_subcommand("simulate", "run a preset or explicit simulation with snapshots and manifest");
    add_run_options(simulate, sim_args, true);

    double oracle_m = 0.5, oracle_dv = 7.2;
    auto* oracle = app.add_subcommand("oracle", "compare the generic pipeline with closed forms");
    oracle->require_subcommand(1);
    auto* oracle_kgs = oracle->add_subcommand("kgs", "Klausmeier-Gray-Scott closed forms");
    oracle_kgs->add_option("--m", oracle_m, "m")->capture_default_str();
    oracle_kgs->add_option("--delta-v", oracle_dv, "delta_v")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        apply_thread_env();
        for (auto* cmd : {profile, simulate}) {
            RunArgs& r = cmd == profile ? profile_args : sim_args;
            r.model_given = cmd->count("--model") > 0;
        }
        if (*steady) return cmd_steady(steady_model, steady_mu, steady_guess);
        if (*turing) return cmd_turing(turing_model, turing_point, dispersion, kmax_factor, kpoints);
        if (*predict) return cmd_predict(predict_model, predict_point);
        if (*analyze) return cmd_analyze(analyze_model, analyze_point, analyze_csv);
        if (*p4map) return cmd_p4map(map_model, map_args);
        if (*match) return cmd_match(match_args);
        if (*profile) return cmd_profile(profile_args);
        if (*simulate) return cmd_simulate(sim_args);
        if (*oracle_kgs) return cmd_oracle_kgs(oracle_m, oracle_dv);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
