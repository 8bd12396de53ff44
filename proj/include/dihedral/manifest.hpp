#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dihedral/presets.hpp"

namespace dihedral {

/// Plain-text run record in the config format: [run], [model], [params],
/// [turing], [localform], [predictors], [pattern], [sim], [outputs]. Numbers are
/// written in shortest round-trip form, so reading it back gives the same run.
std::string format_manifest(const PreparedRun& run, const std::vector<std::string>& outputs = {});
void write_manifest(const std::filesystem::path& path, const PreparedRun& run, const std::vector<std::string>& outputs = {});

PreparedRun read_manifest(const std::filesystem::path& path);
PreparedRun parse_manifest(std::istream& in);

}  // namespace dihedral
