#pragma once

#include <span>
#include <vector>

namespace dihedral {

inline constexpr int kMaxBesselOrder = 64;

/// J_n(x) for integer 0 <= n <= kMaxBesselOrder and x >= 0.
double bessel_j(int n, double x);

/// J_0(x) .. J_nmax(x) in one downward sweep; `out` must hold nmax + 1 values.
void bessel_j_all(int nmax, double x, std::span<double> out);
std::vector<double> bessel_j_all(int nmax, double x);

}  // namespace dihedral
