#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "dihedral/error.hpp"
#include "dihedral/matching.hpp"

using namespace dihedral;

namespace {

// Straight transcriptions of the two sums, written independently of the library.
std::vector<double> spot_loop(int m, int N, const std::vector<double>& a) {
    std::vector<double> r(static_cast<std::size_t>(N + 1));
    for (int n = 0; n <= N; ++n) {
        double s = 0.0;
        for (int j = 1; j <= N - n; ++j) s += 2.0 * std::cos(m * std::numbers::pi * (n - j) / 3.0) * a[j] * a[n + j];
        for (int j = 0; j <= n; ++j) s += std::cos(m * std::numbers::pi * (n - 2 * j) / 3.0) * a[j] * a[n - j];
        r[n] = a[n] - s;
    }
    return r;
}

std::vector<double> ring_loop(int m, int N, const std::vector<double>& b) {
    std::vector<double> r(static_cast<std::size_t>(N + 1));
    for (int n = 0; n <= N; ++n) {
        double s = 0.0;
        for (int i = -N; i <= N; ++i)
            for (int j = -N; j <= N; ++j) {
                const int k = n - i - j;
                if (std::abs(k) > N) continue;
                const int e = m * (std::abs(i) + std::abs(j) - std::abs(k) - n);
                REQUIRE(e % 2 == 0);
                s += ((e / 2) % 2 == 0 ? 1.0 : -1.0) * b[std::abs(i)] * b[std::abs(j)] * b[std::abs(k)];
            }
        r[n] = b[n] - s;
    }
    return r;
}

double max_abs(const std::vector<double>& v) {
    double r = 0.0;
    for (double x : v) r = std::max(r, std::abs(x));
    return r;
}

std::vector<double> random_vec(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    std::vector<double> v(static_cast<std::size_t>(n));
    for (auto& x : v) x = d(rng);
    return v;
}

void check_solution(const MatchingSolution& s) {
    CHECK(s.residual < kMatchResidualTol);
    CHECK(s.jac_min_sv > kMatchMinSingular);
    CHECK(max_abs(s.coeffs) > 0.0);
    const auto direct = s.kind == PatternKind::spotA ? spot_loop(s.m, s.N, s.coeffs) : ring_loop(s.m, s.N, s.coeffs);
    CHECK(std::abs(max_abs(direct) - s.residual) < 1e-14);
}

}  // namespace

TEST_CASE("cosine factor table") {
    for (int m = 1; m <= 12; ++m)
        for (int j = -20; j <= 20; ++j) CHECK(std::abs(hex_cos(m, j) - std::cos(m * std::numbers::pi * j / 3.0)) < 1e-13);
}

TEST_CASE("residuals agree with direct loops") {
    std::mt19937_64 rng(5);
    for (int m : {1, 2, 3, 4, 5, 6, 7})
        for (int N : {0, 1, 2, 3, 5, 8}) {
            const auto c = random_vec(rng, N + 1);
            const auto rs = spotA_residual(m, N, c), rr = ring_residual(m, N, c);
            const auto ds = spot_loop(m, N, c), dr = ring_loop(m, N, c);
            for (int n = 0; n <= N; ++n) {
                CHECK(rs[n] == doctest::Approx(ds[n]).epsilon(1e-12).scale(1.0));
                CHECK(rr[n] == doctest::Approx(dr[n]).epsilon(1e-12).scale(1.0));
            }
            CHECK(matching_residual(PatternKind::ring, m, N, c) == rr);
        }
}

TEST_CASE("trivial cases") {
    CHECK(spotA_residual(6, 0, {1.0})[0] == 0.0);
    CHECK(spotA_residual(6, 0, {0.4})[0] == doctest::Approx(0.4 - 0.16));
    CHECK(ring_residual(4, 0, {0.5})[0] == doctest::Approx(0.5 - 0.125));
    CHECK(max_abs(spotA_residual(5, 4, std::vector<double>(5, 0.0))) == 0.0);
    CHECK(max_abs(ring_residual(5, 4, std::vector<double>(5, 0.0))) == 0.0);
    const auto hex = spotA_residual(6, 2, {0.311, 0.267, 0.189});
    CHECK(max_abs(hex) < 5e-3);
}

TEST_CASE("ring residual is odd") {
    std::mt19937_64 rng(9);
    for (int t = 0; t < 30; ++t) {
        const int m = 1 + t % 7, N = t % 5;
        auto b = random_vec(rng, N + 1), nb = b;
        for (auto& x : nb) x = -x;
        const auto r = ring_residual(m, N, b), nr = ring_residual(m, N, nb);
        for (int n = 0; n <= N; ++n) CHECK(nr[n] == doctest::Approx(-r[n]).epsilon(1e-14));
    }
}

TEST_CASE("sign exponent is integral for odd m") {
    // i + j + k = n makes |i| + |j| - |k| - n even, so odd m never triggers the error.
    std::mt19937_64 rng(3);
    for (int m : {1, 3, 5, 7}) CHECK_NOTHROW(ring_residual(m, 6, random_vec(rng, 7)));
}

TEST_CASE("Jacobian against central differences") {
    std::mt19937_64 rng(17);
    for (PatternKind kind : {PatternKind::spotA, PatternKind::ring})
        for (int N : {0, 2, 4}) {
            const int m = 4 + N;
            const auto c = random_vec(rng, N + 1);
            const auto J = matching_jacobian(kind, m, N, c);
            const double h = 1e-6;
            for (int col = 0; col <= N; ++col) {
                auto p = c, q = c;
                p[col] += h;
                q[col] -= h;
                const auto rp = matching_residual(kind, m, N, p), rq = matching_residual(kind, m, N, q);
                for (int row = 0; row <= N; ++row)
                    CHECK(J[static_cast<std::size_t>(row * (N + 1) + col)] ==
                          doctest::Approx((rp[row] - rq[row]) / (2 * h)).epsilon(1e-7).scale(1.0));
            }
        }
}

TEST_CASE("published coefficient sets are fixed points of Newton polishing") {
    struct Fixture {
        int m, N;
        std::vector<double> a;
    };
    const Fixture fx[] = {{6, 2, {0.311, 0.267, 0.189}},
                          {4, 5, {-0.136, 0.262, 0.236, -0.114, 0.187, 0.145}},
                          {5, 3, {-0.382, 0.300, 0.382, 0.486}}};
    for (const auto& f : fx) {
        CAPTURE(f.m);
        const MatchingSolution s = solve_spotA(f.m, f.N, f.a);
        check_solution(s);
        CHECK(s.residual < kMatchPolishTol);
        for (int n = 0; n <= f.N; ++n) CHECK(std::abs(s.coeffs[n] - f.a[n]) < 5e-4);
    }
}

TEST_CASE("N = 0 solutions") {
    for (int m = 1; m <= 8; ++m) {
        CHECK(solve_spotA(m, 0, {0.7}).coeffs[0] == 1.0);
        CHECK(solve_ring(m, 0, {0.9}).coeffs[0] == 1.0);
        CHECK(solve_ring(m, 0, {-0.9}).coeffs[0] == -1.0);
    }
    CHECK_THROWS_AS(solve_spotA(6, 0, {0.1}), NumericalError);   // drawn to the zero solution
    CHECK_THROWS_AS(solve_spotA(6, 2, {0.1, 0.2}), InputError);
}

TEST_CASE("multistart") {
    SUBCASE("contains the hexagon and pentagon solutions") {
        auto has = [](const std::vector<MatchingSolution>& sols, const std::vector<double>& want) {
            for (const auto& s : sols) {
                bool ok = true;
                for (std::size_t i = 0; i < want.size(); ++i) ok = ok && std::abs(s.coeffs[i] - want[i]) < 1e-3;
                if (ok) return true;
            }
            return false;
        };
        const auto hex = multistart(PatternKind::spotA, 6, 2, {});
        CHECK(has(hex, {0.311, 0.267, 0.189}));
        const auto pent = multistart(PatternKind::spotA, 5, 3, {});
        CHECK(has(pent, {-0.382, 0.300, 0.382, 0.486}));
        for (const auto& s : pent) check_solution(s);
        for (std::size_t i = 0; i < pent.size(); ++i)
            for (std::size_t j = i + 1; j < pent.size(); ++j) {
                double d = 0.0;
                for (int n = 0; n <= 3; ++n) d = std::max(d, std::abs(pent[i].coeffs[n] - pent[j].coeffs[n]));
                CHECK(d > 1e-6);
            }
    }
    SUBCASE("ring N = 0 collapses to one solution") {
        const auto r = multistart(PatternKind::ring, 3, 0, {});
        REQUIRE(r.size() == 1);
        CHECK(r[0].coeffs[0] == 1.0);
    }
    SUBCASE("ring m = 6, N = 1 regression") {
        const auto r = multistart(PatternKind::ring, 6, 1, {});
        // (1/sqrt5, +-sqrt(2/15)), (0, 1/sqrt3) and (1, 0), each up to sign
        REQUIRE(r.size() == 4);
        const double b0 = 1 / std::sqrt(5.0), b1 = std::sqrt(2.0 / 15.0);
        int found = 0;
        for (const auto& s : r) {
            check_solution(s);
            if (std::abs(s.coeffs[0] - b0) < 1e-12 && std::abs(std::abs(s.coeffs[1]) - b1) < 1e-12) ++found;
            if (std::abs(s.coeffs[0]) < 1e-12 && std::abs(s.coeffs[1] - 1 / std::sqrt(3.0)) < 1e-12) ++found;
            if (std::abs(s.coeffs[0] - 1) < 1e-12 && std::abs(s.coeffs[1]) < 1e-12) ++found;
        }
        CHECK(found == 4);
    }
    SUBCASE("deterministic and independent of threading") {
        MultistartOptions a, b;
        a.trials = b.trials = 200;
        a.seed = b.seed = 7;
        b.parallel = false;
        const auto x = multistart(PatternKind::spotA, 4, 3, a), y = multistart(PatternKind::spotA, 4, 3, b);
        REQUIRE(x.size() == y.size());
        for (std::size_t i = 0; i < x.size(); ++i) CHECK(x[i].coeffs == y[i].coeffs);
    }
    SUBCASE("bad trial count") {
        MultistartOptions o;
        o.trials = 0;
        CHECK_THROWS_AS(multistart(PatternKind::spotA, 6, 2, o), InputError);
    }
}
