#include "dihedral/field_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "dihedral/config.hpp"
#include "dihedral/error.hpp"

namespace dihedral {

namespace {

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
    std::ofstream out(path, mode);
    if (!out) throw InputError("cannot write " + path.string());
    return out;
}

}  // namespace

void write_grid_csv(const std::filesystem::path& path, const std::vector<double>& values, int n) {
    if (n < 1 || values.size() != static_cast<std::size_t>(n) * n) throw InputError("grid size mismatch");
    std::string text;
    text.reserve(values.size() * 20);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            if (i) text += ',';
            text += format_double(values[static_cast<std::size_t>(j) * n + i]);
        }
        text += '\n';
    }
    auto out = open_out(path, std::ios::out | std::ios::binary);
    out << text;
    if (!out) throw InputError("write failed: " + path.string());
}

std::vector<double> read_grid_csv(const std::filesystem::path& path, int& n) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read " + path.string());
    std::vector<double> values;
    std::string line;
    int rows = 0, cols = -1;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        int c = 0;
        while (std::getline(ss, cell, ',')) {
            values.push_back(parse_number(cell, path.string()));
            ++c;
        }
        if (cols >= 0 && c != cols) throw InputError(path.string() + ": ragged row " + std::to_string(rows + 1));
        cols = c;
        ++rows;
    }
    if (rows == 0 || rows != cols) throw InputError(path.string() + ": expected a square grid");
    n = rows;
    return values;
}

PgmScale write_pgm(const std::filesystem::path& path, const std::vector<double>& values, int n) {
    if (n < 1 || values.size() != static_cast<std::size_t>(n) * n) throw InputError("grid size mismatch");
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    PgmScale s{*lo, *hi};
    const double span = s.max - s.min;
    std::string data(values.size(), '\0');
    for (int row = 0; row < n; ++row) {
        const int j = n - 1 - row;
        for (int i = 0; i < n; ++i) {
            const double x = values[static_cast<std::size_t>(j) * n + i];
            const double t = span > 0.0 ? (x - s.min) / span : 0.0;
            data[static_cast<std::size_t>(row) * n + i] = static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * t)));
        }
    }
    {
        auto out = open_out(path, std::ios::out | std::ios::binary);
        out << "P5\n" << n << ' ' << n << "\n255\n";
        out.write(data.data(), static_cast<std::streamsize>(data.size()));
        if (!out) throw InputError("write failed: " + path.string());
    }
    auto side = open_out(path.string() + ".scale");
    side << "[scale]\nmin = " << format_double(s.min) << "\nmax = " << format_double(s.max) << "\n";
    return s;
}

PgmScale read_pgm_scale(const std::filesystem::path& pgm_path) {
    std::ifstream in(pgm_path.string() + ".scale");
    if (!in) throw InputError("cannot read " + pgm_path.string() + ".scale");
    PgmScale s;
    for (const ConfigSection& sec : parse_config(in))
        for (const ConfigEntry& e : sec.entries) {
            if (e.key == "min") s.min = parse_number(e.value, "min");
            else if (e.key == "max") s.max = parse_number(e.value, "max");
        }
    return s;
}

void write_field(const std::filesystem::path& dir, const std::string& tag, const Field2D& f) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw InputError("cannot create " + dir.string() + ": " + ec.message());
    for (int c = 0; c < 2; ++c) {
        const std::string base = std::string(c == 0 ? "u" : "v") + "_" + tag;
        write_grid_csv(dir / (base + ".csv"), f.component(c), f.n);
        write_pgm(dir / (base + ".pgm"), f.component(c), f.n);
    }
}

}  // namespace dihedral
