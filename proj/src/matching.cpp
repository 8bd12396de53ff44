#include "dihedral/matching.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <string>

#include "dihedral/error.hpp"

namespace dihedral {

const char* kind_name(PatternKind k) { return k == PatternKind::spotA ? "spotA" : "ring"; }

PatternKind parse_kind(const std::string& text) {
    if (text == "spotA" || text == "spota" || text == "spot") return PatternKind::spotA;
    if (text == "ring") return PatternKind::ring;
    throw InputError("unknown pattern kind '" + text + "' (expected spotA or ring)");
}

double hex_cos(int m, int j) {
    static constexpr double table[6] = {1.0, 0.5, -0.5, -1.0, -0.5, 0.5};
    const long r = (static_cast<long>(m) * j) % 6;
    return table[r < 0 ? r + 6 : r];
}

namespace {

void check_shape(int m, int N, const std::vector<double>& c) {
    if (m < 1) throw InputError("dihedral index m must be >= 1");
    if (N < 0) throw InputError("truncation N must be >= 0");
    if (c.size() != static_cast<std::size_t>(N + 1))
        throw InputError("expected " + std::to_string(N + 1) + " coefficients, got " + std::to_string(c.size()));
}

// Calls visit(n, coef, {indices}) for every monomial in equation n.
template <class Visit>
void spotA_terms(int m, int N, Visit&& visit) {
    for (int n = 0; n <= N; ++n) {
        for (int j = 1; j <= N - n; ++j) visit(n, 2.0 * hex_cos(m, n - j), j, n + j);
        for (int j = 0; j <= n; ++j) visit(n, hex_cos(m, n - 2 * j), j, n - j);
    }
}

template <class Visit>
void ring_terms(int m, int N, Visit&& visit) {
    for (int n = 0; n <= N; ++n)
        for (int i = -N; i <= N; ++i)
            for (int j = -N; j <= N; ++j) {
                const int k = n - i - j;
                if (k < -N || k > N) continue;
                const long e = static_cast<long>(m) * (std::abs(i) + std::abs(j) - std::abs(k) - n);
                if (e % 2 != 0)
                    throw NumericalError("cubic matching sign exponent is not an integer at (i, j, k) = (" +
                                         std::to_string(i) + ", " + std::to_string(j) + ", " + std::to_string(k) + ")");
                const double sign = (e / 2) % 2 == 0 ? 1.0 : -1.0;
                visit(n, sign, std::abs(i), std::abs(j), std::abs(k));
            }
}

double max_abs(const std::vector<double>& x) {
    double r = 0.0;
    for (double v : x) r = std::max(r, std::abs(v));
    return r;
}

}  // namespace

std::vector<double> spotA_residual(int m, int N, const std::vector<double>& a) {
    check_shape(m, N, a);
    std::vector<double> r(a);
    spotA_terms(m, N, [&](int n, double c, int p, int q) { r[n] -= c * a[p] * a[q]; });
    return r;
}

std::vector<double> ring_residual(int m, int N, const std::vector<double>& b) {
    check_shape(m, N, b);
    std::vector<double> r(b);
    ring_terms(m, N, [&](int n, double s, int p, int q, int t) { r[n] -= s * b[p] * b[q] * b[t]; });
    return r;
}

std::vector<double> matching_residual(PatternKind kind, int m, int N, const std::vector<double>& c) {
    return kind == PatternKind::spotA ? spotA_residual(m, N, c) : ring_residual(m, N, c);
}

std::vector<double> matching_jacobian(PatternKind kind, int m, int N, const std::vector<double>& c) {
    check_shape(m, N, c);
    const int n1 = N + 1;
    std::vector<double> J(static_cast<std::size_t>(n1 * n1), 0.0);
    auto at = [&](int row, int col) -> double& { return J[static_cast<std::size_t>(row * n1 + col)]; };
    for (int i = 0; i < n1; ++i) at(i, i) = 1.0;
    if (kind == PatternKind::spotA) {
        spotA_terms(m, N, [&](int n, double s, int p, int q) {
            at(n, p) -= s * c[q];
            at(n, q) -= s * c[p];
        });
    } else {
        ring_terms(m, N, [&](int n, double s, int p, int q, int t) {
            at(n, p) -= s * c[q] * c[t];
            at(n, q) -= s * c[p] * c[t];
            at(n, t) -= s * c[p] * c[q];
        });
    }
    return J;
}

namespace {

Eigen::MatrixXd to_matrix(const std::vector<double>& J, int n1) {
    return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(J.data(), n1, n1);
}

double min_singular_value(PatternKind kind, int m, int N, const std::vector<double>& c) {
    const Eigen::MatrixXd J = to_matrix(matching_jacobian(kind, m, N, c), N + 1);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
    return svd.singularValues().minCoeff();
}

// Damped Newton; returns the final iterate and its residual, no validity checks.
struct NewtonRun {
    std::vector<double> x;
    double residual = 0.0;
    int iterations = 0;
    bool finite = true;
};

NewtonRun newton(PatternKind kind, int m, int N, std::vector<double> x, int max_iter = 80) {
    const int n1 = N + 1;
    NewtonRun run;
    std::vector<double> r = matching_residual(kind, m, N, x);
    double rn = max_abs(r);
    int stalls = 0;
    for (int it = 0; it < max_iter && rn > 0.0; ++it) {
        run.iterations = it + 1;
        const Eigen::MatrixXd J = to_matrix(matching_jacobian(kind, m, N, x), n1);
        const Eigen::VectorXd rhs = -Eigen::Map<const Eigen::VectorXd>(r.data(), n1);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(J, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const Eigen::VectorXd dx = svd.solve(rhs);
        double lambda = 1.0;
        bool improved = false;
        for (int h = 0; h < 12; ++h, lambda *= 0.5) {
            std::vector<double> trial(x);
            for (int i = 0; i < n1; ++i) trial[static_cast<std::size_t>(i)] += lambda * dx[i];
            std::vector<double> rt = matching_residual(kind, m, N, trial);
            const double tn = max_abs(rt);
            if (std::isfinite(tn) && tn < rn) {
                x = std::move(trial);
                r = std::move(rt);
                improved = rn - tn > 1e-3 * rn;
                rn = tn;
                break;
            }
        }
        // Keep going while steps still reduce the residual (this lands N = 0 on
        // exactly 1); past the polish tolerance a few stalled steps end the run.
        if (!improved && rn <= kMatchPolishTol && ++stalls >= 3) break;
        if (!improved && rn > kMatchPolishTol && ++stalls >= 20) break;
        if (max_abs(x) > 1e6) {
            run.finite = false;
            break;
        }
    }
    run.x = std::move(x);
    run.residual = rn;
    run.finite = run.finite && std::isfinite(rn);
    return run;
}

}  // namespace

MatchingSolution solve_matching(PatternKind kind, int m, int N, const std::vector<double>& initial) {
    check_shape(m, N, initial);
    const NewtonRun run = newton(kind, m, N, initial);
    if (!run.finite || !(run.residual < kMatchResidualTol))
        throw NumericalError(std::string(kind_name(kind)) + " matching: Newton did not converge (residual " +
                             std::to_string(run.residual) + ")");
    if (max_abs(run.x) < 1e-8) throw NumericalError(std::string(kind_name(kind)) + " matching: converged to the zero solution");
    MatchingSolution s;
    s.m = m;
    s.N = N;
    s.kind = kind;
    s.coeffs = run.x;
    s.residual = run.residual;
    s.iterations = run.iterations;
    s.jac_min_sv = min_singular_value(kind, m, N, run.x);
    if (!(s.jac_min_sv > kMatchMinSingular))
        throw NumericalError(std::string(kind_name(kind)) + " matching: degenerate Jacobian (min singular value " +
                             std::to_string(s.jac_min_sv) + ")");
    return s;
}

MatchingSolution solve_spotA(int m, int N, const std::vector<double>& initial) {
    return solve_matching(PatternKind::spotA, m, N, initial);
}

MatchingSolution solve_ring(int m, int N, const std::vector<double>& initial) {
    return solve_matching(PatternKind::ring, m, N, initial);
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::vector<MatchingSolution> multistart(PatternKind kind, int m, int N, const MultistartOptions& opt) {
    if (opt.trials < 1) throw InputError("multistart needs at least one trial");
    check_shape(m, N, std::vector<double>(static_cast<std::size_t>(N + 1)));
    if (kind == PatternKind::ring) (void)ring_residual(m, N, std::vector<double>(static_cast<std::size_t>(N + 1)));

    std::vector<std::optional<MatchingSolution>> found(static_cast<std::size_t>(opt.trials));
#pragma omp parallel for schedule(dynamic, 8) if (opt.parallel)
    for (int t = 0; t < opt.trials; ++t) {
        std::mt19937_64 rng(splitmix64(opt.seed ^ splitmix64(static_cast<std::uint64_t>(t))));
        std::uniform_real_distribution<double> U(-1.0, 1.0);
        std::vector<double> x0(static_cast<std::size_t>(N + 1));
        for (double& x : x0) x = U(rng);
        try {
            MatchingSolution s = solve_matching(kind, m, N, x0);
            if (kind == PatternKind::ring) {
                auto lead = std::find_if(s.coeffs.begin(), s.coeffs.end(), [](double c) { return std::abs(c) > 1e-9; });
                if (lead != s.coeffs.end() && *lead < 0.0)
                    for (double& c : s.coeffs) c = -c;
            }
            found[static_cast<std::size_t>(t)] = std::move(s);
        } catch (const Error&) {
            // failed start; nothing to record
        }
    }

    std::vector<MatchingSolution> all;
    for (auto& f : found)
        if (f) all.push_back(std::move(*f));
    std::sort(all.begin(), all.end(), [](const MatchingSolution& a, const MatchingSolution& b) { return a.coeffs < b.coeffs; });
    std::vector<MatchingSolution> unique;
    for (auto& s : all) {
        const bool dup = std::any_of(unique.begin(), unique.end(), [&](const MatchingSolution& u) {
            double d = 0.0;
            for (std::size_t i = 0; i < s.coeffs.size(); ++i) d = std::max(d, std::abs(s.coeffs[i] - u.coeffs[i]));
            return d <= opt.dedup_distance;
        });
        if (!dup) unique.push_back(std::move(s));
    }
    return unique;
}

}  // namespace dihedral
