#include <cmath>

#include "dihedral/error.hpp"
#include "dihedral/kernels.hpp"

namespace dihedral {

LineSolver::LineSolver(int n_, double r_) : n(n_), r(r_), lower(static_cast<std::size_t>(n_)),
                                            inv_pivot(static_cast<std::size_t>(n_)), cprime(static_cast<std::size_t>(n_)) {
    if (n < 3) throw InputError("line solver needs at least 3 points");
    if (!(r >= 0.0)) throw InputError("line solver needs r >= 0");
    auto a = [&](int i) { return i == 0 ? 0.0 : (i == n - 1 ? -2.0 * r : -r); };
    auto c = [&](int i) { return i == n - 1 ? 0.0 : (i == 0 ? -2.0 * r : -r); };
    const double b = 1.0 + 2.0 * r;
    double cp = 0.0;
    for (int i = 0; i < n; ++i) {
        const double pivot = b - a(i) * cp;
        lower[static_cast<std::size_t>(i)] = a(i);
        inv_pivot[static_cast<std::size_t>(i)] = 1.0 / pivot;
        cp = c(i) / pivot;
        cprime[static_cast<std::size_t>(i)] = cp;
    }
}

namespace kernels::serial {

namespace {

void thomas(const LineSolver& s, double* x) {
    const int n = s.n;
    x[0] *= s.inv_pivot[0];
    for (int i = 1; i < n; ++i) x[i] = (x[i] - s.lower[static_cast<std::size_t>(i)] * x[i - 1]) * s.inv_pivot[static_cast<std::size_t>(i)];
    for (int i = n - 2; i >= 0; --i) x[i] -= s.cprime[static_cast<std::size_t>(i)] * x[i + 1];
}

}  // namespace

void solve_x(const LineSolver& s, std::span<double> w) {
    for (int j = 0; j < s.n; ++j) thomas(s, w.data() + static_cast<std::size_t>(j) * s.n);
}

void solve_y(const LineSolver& s, std::span<double> w) {
    const int n = s.n;
    std::vector<double> col(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) col[static_cast<std::size_t>(j)] = w[static_cast<std::size_t>(j) * n + i];
        thomas(s, col.data());
        for (int j = 0; j < n; ++j) w[static_cast<std::size_t>(j) * n + i] = col[static_cast<std::size_t>(j)];
    }
}

void rdp(const LineSolver& third, const LineSolver& quarter, std::span<double> w, std::vector<double>& scratch) {
    scratch.assign(w.begin(), w.end());
    solve_x(third, scratch);
    solve_x(quarter, w);
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = 9.0 * scratch[k] - 8.0 * w[k];
    scratch.assign(w.begin(), w.end());
    solve_y(third, scratch);
    solve_y(quarter, w);
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = 9.0 * scratch[k] - 8.0 * w[k];
}

void axpy(std::span<const double> a, double c, std::span<const double> b, std::span<double> out) {
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = a[k] + c * b[k];
}

void eval(const Program& p, std::span<const double> u, std::span<const double> v, double mu, std::span<double> out) {
    p.batch(u, v, mu, out);
}

bool bounded(std::span<const double> w, double limit) {
    for (double x : w)
        if (!(std::abs(x) <= limit)) return false;
    return true;
}

}  // namespace kernels::serial

}  // namespace dihedral
