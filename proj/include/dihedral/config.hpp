#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <string>
#include <vector>

#include "dihedral/model.hpp"

namespace dihedral {

/// One `key = value` line from an INI-like file. Values keep their quotes
/// stripped; `quoted` says whether they had them.
struct ConfigEntry {
    std::string key;
    std::string value;
    bool quoted = false;
    int line = 0;
};

struct ConfigSection {
    std::string name;
    std::vector<ConfigEntry> entries;
};

/// Line-oriented sections: `[section]`, `key = value`, `# comment`.
std::vector<ConfigSection> parse_config(std::istream& in);

/// Builds a model from `[model]` and `[params]` sections. Either
/// `builtin = <name>` (with [params] as overrides) or explicit fhat/ghat/D_v.
ModelSpec model_from_config(const std::vector<ConfigSection>& sections);
ModelSpec read_model_file(const std::filesystem::path& path);

/// Serializes a model to the config format; read back it gives an identical model.
std::string write_model_config(const ModelSpec& model);

/// Builtin name, or a path to a model config file.
ModelSpec resolve_model(const std::string& source, const std::map<std::string, double>& overrides = {});

double parse_number(const std::string& text, const std::string& what);

}  // namespace dihedral
