#include <omp.h>

#include <algorithm>
#include <cmath>

#include "dihedral/kernels.hpp"

namespace dihedral::kernels::omp {

void solve_x(const LineSolver& s, std::span<double> w) {
    const int n = s.n;
    const double* a = s.lower.data();
    const double* ip = s.inv_pivot.data();
    const double* cp = s.cprime.data();
#pragma omp parallel for schedule(static)
    for (int j = 0; j < n; ++j) {
        double* x = w.data() + static_cast<std::size_t>(j) * n;
        x[0] *= ip[0];
        for (int i = 1; i < n; ++i) x[i] = (x[i] - a[i] * x[i - 1]) * ip[i];
        for (int i = n - 2; i >= 0; --i) x[i] -= cp[i] * x[i + 1];
    }
}

// Columns are swept a whole row at a time so the inner loop is contiguous;
// threads own disjoint column blocks.
void solve_y(const LineSolver& s, std::span<double> w) {
    const int n = s.n;
    const double* a = s.lower.data();
    const double* ip = s.inv_pivot.data();
    const double* cp = s.cprime.data();
    double* base = w.data();
#pragma omp parallel
    {
        const int nt = omp_get_num_threads(), t = omp_get_thread_num();
        const int chunk = (n + nt - 1) / nt;
        const int i0 = std::min(n, t * chunk), i1 = std::min(n, i0 + chunk);
        if (i0 < i1) {
            for (int i = i0; i < i1; ++i) base[i] *= ip[0];
            for (int j = 1; j < n; ++j) {
                double* row = base + static_cast<std::size_t>(j) * n;
                const double* prev = row - n;
                const double aj = a[j], pj = ip[j];
#pragma omp simd
                for (int i = i0; i < i1; ++i) row[i] = (row[i] - aj * prev[i]) * pj;
            }
            for (int j = n - 2; j >= 0; --j) {
                double* row = base + static_cast<std::size_t>(j) * n;
                const double* next = row + n;
                const double cj = cp[j];
#pragma omp simd
                for (int i = i0; i < i1; ++i) row[i] -= cj * next[i];
            }
        }
    }
}

void rdp(const LineSolver& third, const LineSolver& quarter, std::span<double> w, std::vector<double>& scratch) {
    const std::ptrdiff_t size = static_cast<std::ptrdiff_t>(w.size());
    scratch.resize(w.size());
    for (int pass = 0; pass < 2; ++pass) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t k = 0; k < size; ++k) scratch[static_cast<std::size_t>(k)] = w[static_cast<std::size_t>(k)];
        if (pass == 0) {
            solve_x(third, scratch);
            solve_x(quarter, w);
        } else {
            solve_y(third, scratch);
            solve_y(quarter, w);
        }
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t k = 0; k < size; ++k) {
            const std::size_t q = static_cast<std::size_t>(k);
            w[q] = 9.0 * scratch[q] - 8.0 * w[q];
        }
    }
}

void axpy(std::span<const double> a, double c, std::span<const double> b, std::span<double> out) {
    const std::ptrdiff_t size = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < size; ++k) {
        const std::size_t q = static_cast<std::size_t>(k);
        out[q] = a[q] + c * b[q];
    }
}

void eval(const Program& p, std::span<const double> u, std::span<const double> v, double mu, std::span<double> out) {
    constexpr std::size_t kBlock = 4096;
    const std::ptrdiff_t blocks = static_cast<std::ptrdiff_t>((out.size() + kBlock - 1) / kBlock);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < blocks; ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * kBlock, len = std::min(kBlock, out.size() - lo);
        p.batch(u.subspan(lo, len), v.subspan(lo, len), mu, out.subspan(lo, len));
    }
}

bool bounded(std::span<const double> w, double limit) {
    const std::ptrdiff_t size = static_cast<std::ptrdiff_t>(w.size());
    int bad = 0;
#pragma omp parallel for schedule(static) reduction(| : bad)
    for (std::ptrdiff_t k = 0; k < size; ++k)
        if (!(std::abs(w[static_cast<std::size_t>(k)]) <= limit)) bad |= 1;
    return bad == 0;
}

}  // namespace dihedral::kernels::omp
