#include "dihedral/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "dihedral/error.hpp"

namespace dihedral {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

[[noreturn]] void fail(int line, const std::string& msg) {
    throw InputError("config line " + std::to_string(line) + ": " + msg);
}

}  // namespace

double parse_number(const std::string& text, const std::string& what) {
    const std::string t = trim(text);
    double x = 0.0;
    std::string buf;
    for (std::size_t i = 0; i < t.size(); ++i)
        if (!(t[i] == '+' && (i == 0 || t[i - 1] == 'e' || t[i - 1] == 'E'))) buf.push_back(t[i]);
    auto [p, ec] = std::from_chars(buf.data(), buf.data() + buf.size(), x);
    if (buf.empty() || ec != std::errc() || p != buf.data() + buf.size())
        throw InputError("expected a number for " + what + ", got '" + text + "'");
    return x;
}

std::vector<ConfigSection> parse_config(std::istream& in) {
    std::vector<ConfigSection> out;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        // Strip comments outside quotes.
        std::string s;
        bool inq = false;
        for (char c : raw) {
            if (c == '"') inq = !inq;
            if (c == '#' && !inq) break;
            s.push_back(c);
        }
        if (inq) fail(line, "unterminated string");
        s = trim(s);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') fail(line, "malformed section header");
            out.push_back({trim(s.substr(1, s.size() - 2)), {}});
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) fail(line, "expected 'key = value'");
        if (out.empty()) fail(line, "entry outside of a section");
        ConfigEntry e;
        e.key = trim(s.substr(0, eq));
        e.value = trim(s.substr(eq + 1));
        e.line = line;
        if (e.key.empty()) fail(line, "empty key");
        if (e.value.size() >= 2 && e.value.front() == '"' && e.value.back() == '"') {
            e.value = e.value.substr(1, e.value.size() - 2);
            e.quoted = true;
        } else if (e.value.find('"') != std::string::npos) {
            fail(line, "stray quote");
        }
        out.back().entries.push_back(std::move(e));
    }
    return out;
}

ModelSpec model_from_config(const std::vector<ConfigSection>& sections) {
    const ConfigSection* model = nullptr;
    const ConfigSection* params = nullptr;
    for (const auto& s : sections) {
        const ConfigSection** slot = nullptr;
        if (s.name == "model") slot = &model;
        else if (s.name == "params") slot = &params;
        else throw InputError("unknown config section [" + s.name + "]");
        if (*slot) throw InputError("duplicate config section [" + s.name + "]");
        *slot = &s;
    }
    if (!model) throw InputError("config has no [model] section");

    std::map<std::string, ConfigEntry> kv;
    for (const auto& e : model->entries) {
        if (kv.count(e.key)) fail(e.line, "duplicate key '" + e.key + "'");
        kv[e.key] = e;
    }
    std::map<std::string, double> pvals;
    if (params)
        for (const auto& e : params->entries) {
            if (pvals.count(e.key)) fail(e.line, "duplicate parameter '" + e.key + "'");
            pvals[e.key] = parse_number(e.value, "parameter " + e.key);
        }

    static const std::set<std::string> allowed = {"name", "builtin", "fhat", "ghat", "D_v", "beta"};
    for (const auto& [k, e] : kv)
        if (!allowed.count(k)) fail(e.line, "unknown key '" + k + "' in [model]");

    auto number = [&](const std::string& key, double fallback, bool required) {
        auto it = kv.find(key);
        if (it == kv.end()) {
            if (required) throw InputError("[model] needs '" + key + "'");
            return fallback;
        }
        return parse_number(it->second.value, key);
    };

    if (kv.count("builtin")) {
        if (kv.count("fhat") || kv.count("ghat")) throw InputError("a builtin model cannot redefine fhat/ghat");
        auto overrides = pvals;
        if (kv.count("D_v")) overrides["D_v"] = number("D_v", 0.0, true);
        if (kv.count("beta")) overrides["beta"] = number("beta", 0.0, true);
        return builtin_model(kv["builtin"].value, overrides);
    }

    for (const char* key : {"fhat", "ghat"}) {
        auto it = kv.find(key);
        if (it == kv.end()) throw InputError(std::string("[model] needs '") + key + "'");
        if (!it->second.quoted) fail(it->second.line, std::string(key) + " must be a quoted expression");
    }
    std::set<std::string> declared;
    for (const auto& p : pvals) declared.insert(p.first);
    const std::string name = kv.count("name") ? kv["name"].value : "custom";
    Expr fhat, ghat;
    try {
        fhat = parse(kv["fhat"].value, declared);
        ghat = parse(kv["ghat"].value, declared);
    } catch (const ParseError& e) {
        throw InputError("in model expression: " + std::string(e.what()));
    }
    return ModelSpec(name, fhat, ghat, number("D_v", 1.0, true), number("beta", 0.0, false), pvals);
}

ModelSpec read_model_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open model file '" + path.string() + "'");
    return model_from_config(parse_config(in));
}

std::string write_model_config(const ModelSpec& model) {
    std::ostringstream os;
    os << "[model]\n"
       << "name = " << model.name() << "\n"
       << "fhat = \"" << to_string(model.fhat()) << "\"\n"
       << "ghat = \"" << to_string(model.ghat()) << "\"\n"
       << "D_v = " << format_double(model.D_v()) << "\n"
       << "beta = " << format_double(model.beta()) << "\n"
       << "[params]\n";
    for (const auto& [k, v] : model.params()) os << k << " = " << format_double(v) << "\n";
    return os.str();
}

ModelSpec resolve_model(const std::string& source, const std::map<std::string, double>& overrides) {
    for (const auto& n : builtin_names())
        if (n == source) return builtin_model(source, overrides);
    if (std::filesystem::exists(source)) {
        ModelSpec m = read_model_file(source);
        for (const auto& [k, v] : overrides) m = m.with(k, v);
        return m;
    }
    return builtin_model(source, overrides);  // produces the unknown-model message
}

}  // namespace dihedral
