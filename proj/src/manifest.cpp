#include "dihedral/manifest.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "dihedral/config.hpp"
#include "dihedral/error.hpp"

namespace dihedral {

namespace {

std::string join(const std::vector<double>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) s += ", ";
        s += format_double(xs[i]);
    }
    return s;
}

std::vector<double> split_numbers(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (item.find_first_not_of(" \t") != std::string::npos) out.push_back(parse_number(item, what));
    return out;
}

class Section {
public:
    Section(const std::string& name, const std::vector<ConfigSection>& all) : name_(name) {
        for (const auto& s : all)
            if (s.name == name)
                for (const auto& e : s.entries) kv_[e.key] = e.value;
    }
    const std::string& str(const std::string& key) const {
        auto it = kv_.find(key);
        if (it == kv_.end()) throw InputError("manifest [" + name_ + "] lacks '" + key + "'");
        return it->second;
    }
    double num(const std::string& key) const { return parse_number(str(key), name_ + "." + key); }
    int integer(const std::string& key) const { return static_cast<int>(num(key)); }
    bool has(const std::string& key) const { return kv_.count(key) > 0; }

private:
    std::string name_;
    std::map<std::string, std::string> kv_;
};

}  // namespace

std::string format_manifest(const PreparedRun& r, const std::vector<std::string>& outputs) {
    std::ostringstream os;
    auto kv = [&](const char* k, double v) { os << k << " = " << format_double(v) << "\n"; };
    os << "# dihedral run manifest\n[run]\npreset = " << r.preset << "\n";
    os << write_model_config(r.model);
    os << "[turing]\n";
    kv("u", r.tp.state.u);
    kv("v", r.tp.state.v);
    kv("mu", r.tp.state.mu);
    kv("residual", r.tp.state.residual);
    kv("k", r.tp.k);
    kv("discriminant_residual", r.tp.discriminant_residual);
    os << "eps_side = " << r.tp.eps_side << "\n";
    kv("wavelength", r.tp.wavelength());
    os << "[localform]\n";
    kv("U0_u", r.lf.U0[0]);
    kv("U0_v", r.lf.U0[1]);
    kv("U1_u", r.lf.U1[0]);
    kv("U1_v", r.lf.U1[1]);
    kv("gamma", r.lf.gamma);
    kv("c0", r.lf.c0);
    kv("c3", r.lf.c3);
    os << "M2_method = " << r.lf.m2_method << "\n";
    os << "[predictors]\n";
    kv("P1", r.pred.P1);
    kv("P2", r.pred.P2);
    kv("P3", r.pred.P3);
    kv("P4", r.pred.P4);
    os << "[pattern]\nkind = " << kind_name(r.pattern.kind) << "\n";
    os << "m = " << r.pattern.matching.m << "\nN = " << r.pattern.matching.N << "\n";
    os << "coeffs = " << join(r.pattern.matching.coeffs) << "\n";
    kv("matching_residual", r.pattern.matching.residual);
    kv("jac_min_sv", r.pattern.matching.jac_min_sv);
    kv("eps", r.pattern.eps);
    kv("amplitude", r.pattern.amplitude);
    os << "[sim]\n";
    kv("dt", r.cfg.dt);
    kv("t_end", r.cfg.t_end);
    os << "n_grid = " << r.cfg.n_grid << "\n";
    kv("L", r.cfg.L);
    kv("mu", r.cfg.mu);
    os << "snapshots = " << join(r.cfg.snapshot_times) << "\n";
    kv("blowup", r.cfg.blowup);
    kv("background_u", r.background.u);
    kv("background_v", r.background.v);
    if (!outputs.empty()) {
        os << "[outputs]\n";
        for (std::size_t i = 0; i < outputs.size(); ++i) os << "file" << i << " = " << outputs[i] << "\n";
    }
    return os.str();
}

void write_manifest(const std::filesystem::path& path, const PreparedRun& run, const std::vector<std::string>& outputs) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path.string());
    out << format_manifest(run, outputs);
    if (!out) throw InputError("write failed: " + path.string());
}

PreparedRun parse_manifest(std::istream& in) {
    const std::vector<ConfigSection> all = parse_config(in);
    std::vector<ConfigSection> model_sections;
    for (const auto& s : all)
        if (s.name == "model" || s.name == "params") model_sections.push_back(s);
    ModelSpec model = model_from_config(model_sections);

    const Section run("run", all), tu("turing", all), lf("localform", all), pr("predictors", all), pa("pattern", all),
        sim("sim", all);

    TuringPoint tp;
    tp.state = {tu.num("u"), tu.num("v"), tu.num("mu"), tu.num("residual")};
    tp.k = tu.num("k");
    tp.discriminant_residual = tu.num("discriminant_residual");
    tp.eps_side = tu.integer("eps_side");
    tp.repeated_negative_root = true;

    LocalForm form;
    form.U0 = {lf.num("U0_u"), lf.num("U0_v")};
    form.U1 = {lf.num("U1_u"), lf.num("U1_v")};
    form.gamma = lf.num("gamma");
    form.c0 = lf.num("c0");
    form.c3 = lf.num("c3");
    form.k = tp.k;
    form.m2_method = lf.str("M2_method");

    Predictors pred{pr.num("P1"), pr.num("P2"), pr.num("P3"), pr.num("P4")};

    PatternSpec pattern;
    pattern.kind = parse_kind(pa.str("kind"));
    pattern.matching.kind = pattern.kind;
    pattern.matching.m = pa.integer("m");
    pattern.matching.N = pa.integer("N");
    pattern.matching.coeffs = split_numbers(pa.str("coeffs"), "pattern.coeffs");
    pattern.matching.residual = pa.num("matching_residual");
    pattern.matching.jac_min_sv = pa.num("jac_min_sv");
    pattern.eps = pa.num("eps");
    pattern.amplitude = pa.num("amplitude");

    SimConfig cfg;
    cfg.dt = sim.num("dt");
    cfg.t_end = sim.num("t_end");
    cfg.n_grid = sim.integer("n_grid");
    cfg.L = sim.num("L");
    cfg.mu = sim.num("mu");
    cfg.snapshot_times = split_numbers(sim.str("snapshots"), "sim.snapshots");
    if (sim.has("blowup")) cfg.blowup = sim.num("blowup");
    SteadyState bg{sim.num("background_u"), sim.num("background_v"), cfg.mu, 0.0};

    return PreparedRun{run.str("preset"), std::move(model), tp, form, pred, std::move(pattern), cfg, bg};
}

PreparedRun read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read manifest " + path.string());
    return parse_manifest(in);
}

}  // namespace dihedral
