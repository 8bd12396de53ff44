#pragma once

// Building blocks of the dimensionally split diffusion solves. Fields are
// n x n row-major arrays (index j * n + i, x along i). The serial namespace is
// the plain reference; omp holds the threaded versions used by the integrator.
// Both are expected to agree to rounding.

#include <span>
#include <vector>

#include "dihedral/program.hpp"

namespace dihedral {

/// Factored I + r T on one grid line, T the second-difference matrix with
/// ghost-point (Neumann) rows [2, -2] and [-2, 2]; r = dt D / h^2.
struct LineSolver {
    int n = 0;
    double r = 0.0;
    std::vector<double> lower;      // a_i
    std::vector<double> inv_pivot;  // 1 / (b_i - a_i c'_{i-1})
    std::vector<double> cprime;     // c'_i

    LineSolver() = default;
    LineSolver(int n, double r);
};

namespace kernels {

namespace serial {
/// w <- (I + r T_x)^{-1} w
void solve_x(const LineSolver& s, std::span<double> w);
/// w <- (I + r T_y)^{-1} w
void solve_y(const LineSolver& s, std::span<double> w);
/// w <- R_y R_x w with R = 9 (I + rT/3)^{-1} - 8 (I + rT/4)^{-1}.
void rdp(const LineSolver& third, const LineSolver& quarter, std::span<double> w, std::vector<double>& scratch);
/// out = a + c * b
void axpy(std::span<const double> a, double c, std::span<const double> b, std::span<double> out);
void eval(const Program& p, std::span<const double> u, std::span<const double> v, double mu, std::span<double> out);
/// false if any value is non-finite or exceeds `limit` in magnitude
bool bounded(std::span<const double> w, double limit);
}  // namespace serial

namespace omp {
void solve_x(const LineSolver& s, std::span<double> w);
void solve_y(const LineSolver& s, std::span<double> w);
void rdp(const LineSolver& third, const LineSolver& quarter, std::span<double> w, std::vector<double>& scratch);
void axpy(std::span<const double> a, double c, std::span<const double> b, std::span<double> out);
void eval(const Program& p, std::span<const double> u, std::span<const double> v, double mu, std::span<double> out);
bool bounded(std::span<const double> w, double limit);
}  // namespace omp

/// One backend as a table, so callers can pick serial or threaded at run time.
struct KernelSet {
    void (*solve_x)(const LineSolver&, std::span<double>);
    void (*solve_y)(const LineSolver&, std::span<double>);
    void (*rdp)(const LineSolver&, const LineSolver&, std::span<double>, std::vector<double>&);
    void (*axpy)(std::span<const double>, double, std::span<const double>, std::span<double>);
    void (*eval)(const Program&, std::span<const double>, std::span<const double>, double, std::span<double>);
    bool (*bounded)(std::span<const double>, double);
};

inline constexpr KernelSet kSerial{serial::solve_x, serial::solve_y, serial::rdp, serial::axpy, serial::eval, serial::bounded};
inline constexpr KernelSet kOpenMP{omp::solve_x, omp::solve_y, omp::rdp, omp::axpy, omp::eval, omp::bounded};

}  // namespace kernels

}  // namespace dihedral
