#include "dihedral/bessel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dihedral/error.hpp"

namespace dihedral {

namespace {

void check_args(int nmax, double x) {
    if (nmax < 0 || nmax > kMaxBesselOrder)
        throw InputError("Bessel order " + std::to_string(nmax) + " outside [0, " + std::to_string(kMaxBesselOrder) + "]");
    if (!(x >= 0.0) || !std::isfinite(x)) throw InputError("Bessel argument must be finite and >= 0");
}

}  // namespace

// Miller's algorithm: recur J_{n-1} = (2n/x) J_n - J_{n+1} downward from an
// order well above both nmax and x, then normalize with J_0 + 2 sum J_2k = 1.
// Downward recurrence is stable for every order, so this covers the whole
// range; values that underflow after rescaling are genuinely negligible.
void bessel_j_all(int nmax, double x, std::span<double> out) {
    check_args(nmax, x);
    if (out.size() < static_cast<std::size_t>(nmax + 1)) throw InputError("bessel_j_all: output span too short");
    std::fill(out.begin(), out.begin() + nmax + 1, 0.0);
    if (x == 0.0) {
        out[0] = 1.0;
        return;
    }
    const double top = std::max<double>(nmax, x);
    int start = static_cast<int>(top + 20.0 + std::sqrt(40.0 * top));
    start += start & 1;

    constexpr double kBig = 1e250, kSmall = 1e-250;
    double jp = 0.0, j = 1e-300, norm = 0.0;
    const double two_over_x = 2.0 / x;
    for (int n = start; n > 0; --n) {
        const double jm = n * two_over_x * j - jp;
        jp = j;
        j = jm;  // now J_{n-1}
        if (n - 1 <= nmax) out[static_cast<std::size_t>(n - 1)] = j;
        if (n - 1 > 0 && (n - 1) % 2 == 0) norm += 2.0 * j;
        if (std::abs(j) > kBig) {
            j *= kSmall;
            jp *= kSmall;
            norm *= kSmall;
            for (int i = n - 1; i <= nmax; ++i) out[static_cast<std::size_t>(i)] *= kSmall;
        }
    }
    norm += j;
    for (int i = 0; i <= nmax; ++i) out[static_cast<std::size_t>(i)] /= norm;
}

std::vector<double> bessel_j_all(int nmax, double x) {
    check_args(nmax, x);
    std::vector<double> out(static_cast<std::size_t>(nmax + 1));
    bessel_j_all(nmax, x, out);
    return out;
}

double bessel_j(int n, double x) {
    check_args(n, x);
    double buf[kMaxBesselOrder + 1];
    bessel_j_all(n, x, std::span<double>(buf, static_cast<std::size_t>(n + 1)));
    return buf[n];
}

}  // namespace dihedral
