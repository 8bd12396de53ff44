#pragma once

#include <filesystem>
#include <vector>

#include "dihedral/profile.hpp"

namespace dihedral {

/// One line per grid row (j = 0 first), n comma-separated values in shortest
/// round-trip form. Byte-identical for identical data.
void write_grid_csv(const std::filesystem::path& path, const std::vector<double>& values, int n);
std::vector<double> read_grid_csv(const std::filesystem::path& path, int& n);

struct PgmScale {
    double min = 0.0, max = 0.0;
};

/// Binary P5 image, min-max scaled to 0..255, top image row = largest y.
/// The scale goes to `<path>.scale`: a `[scale]` section with `min` and `max`.
PgmScale write_pgm(const std::filesystem::path& path, const std::vector<double>& values, int n);
PgmScale read_pgm_scale(const std::filesystem::path& pgm_path);

/// Writes `<dir>/<component>_<tag>.{csv,pgm}` for u and v.
void write_field(const std::filesystem::path& dir, const std::string& tag, const Field2D& f);

}  // namespace dihedral
