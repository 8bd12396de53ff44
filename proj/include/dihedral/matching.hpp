#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dihedral {

enum class PatternKind { spotA, ring };

const char* kind_name(PatternKind k);
PatternKind parse_kind(const std::string& text);

struct MatchingSolution {
    int m = 1;
    int N = 0;
    PatternKind kind = PatternKind::spotA;
    std::vector<double> coeffs;   // a_0..a_N or b_0..b_N
    double residual = 0.0;        // max-norm of the matching equations
    double jac_min_sv = 0.0;      // smallest singular value of d(residual)/d(coeffs)
    int iterations = 0;
};

inline constexpr double kMatchResidualTol = 1e-10;
inline constexpr double kMatchPolishTol = 1e-12;
inline constexpr double kMatchMinSingular = 1e-8;

/// cos(m pi j / 3) from (m j mod 6), exactly one of {1, 1/2, -1/2, -1}.
double hex_cos(int m, int j);

/// r_n = a_n - 2 sum_{j=1}^{N-n} cos(m pi (n-j)/3) a_j a_{n+j} - sum_{j=0}^{n} cos(m pi (n-2j)/3) a_j a_{n-j}.
std::vector<double> spotA_residual(int m, int N, const std::vector<double>& a);

/// r_n = b_n - sum over i + j + k = n (|i|, |j|, |k| <= N) of
/// (-1)^{m(|i|+|j|-|k|-n)/2} b_|i| b_|j| b_|k|.
/// Throws NumericalError naming (i, j, k) if an exponent is not an integer.
std::vector<double> ring_residual(int m, int N, const std::vector<double>& b);

std::vector<double> matching_residual(PatternKind kind, int m, int N, const std::vector<double>& c);

/// Row-major (N+1)x(N+1) Jacobian of matching_residual.
std::vector<double> matching_jacobian(PatternKind kind, int m, int N, const std::vector<double>& c);

/// Newton from `initial`, polished to kMatchPolishTol. Throws NumericalError on
/// divergence, convergence to zero, or a degenerate Jacobian.
MatchingSolution solve_matching(PatternKind kind, int m, int N, const std::vector<double>& initial);
MatchingSolution solve_spotA(int m, int N, const std::vector<double>& initial);
MatchingSolution solve_ring(int m, int N, const std::vector<double>& initial);

struct MultistartOptions {
    int trials = 500;
    std::uint64_t seed = 42;
    bool parallel = true;
    double dedup_distance = 1e-6;
};

/// Random starts uniform in [-1, 1]^{N+1}. Every trial draws from its own
/// generator seeded by splitmix64(seed, trial), so results do not depend on
/// scheduling. Ring solutions are reported with a positive leading coefficient.
std::vector<MatchingSolution> multistart(PatternKind kind, int m, int N, const MultistartOptions& opt = {});

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace dihedral
