#pragma once

#include <array>
#include <cmath>
#include <complex>

namespace dihedral {

using Vec2 = std::array<double, 2>;

inline Vec2 operator+(const Vec2& a, const Vec2& b) { return {a[0] + b[0], a[1] + b[1]}; }
inline Vec2 operator-(const Vec2& a, const Vec2& b) { return {a[0] - b[0], a[1] - b[1]}; }
inline Vec2 operator*(double s, const Vec2& a) { return {s * a[0], s * a[1]}; }
inline double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }
inline double norm_inf(const Vec2& a) { return std::max(std::abs(a[0]), std::abs(a[1])); }

/// Row-major 2x2 matrix.
struct Mat2 {
    double a00 = 0.0, a01 = 0.0, a10 = 0.0, a11 = 0.0;

    double trace() const { return a00 + a11; }
    double det() const { return a00 * a11 - a01 * a10; }

    Vec2 operator*(const Vec2& x) const { return {a00 * x[0] + a01 * x[1], a10 * x[0] + a11 * x[1]}; }
    Mat2 operator+(const Mat2& o) const { return {a00 + o.a00, a01 + o.a01, a10 + o.a10, a11 + o.a11}; }
    Mat2 operator-(const Mat2& o) const { return {a00 - o.a00, a01 - o.a01, a10 - o.a10, a11 - o.a11}; }
    Mat2 operator*(const Mat2& o) const {
        return {a00 * o.a00 + a01 * o.a10, a00 * o.a01 + a01 * o.a11, a10 * o.a00 + a11 * o.a10, a10 * o.a01 + a11 * o.a11};
    }
    friend Mat2 operator*(double s, const Mat2& m) { return {s * m.a00, s * m.a01, s * m.a10, s * m.a11}; }

    /// Solves A x = b by Cramer's rule; the caller guarantees det() != 0.
    Vec2 solve(const Vec2& b) const {
        const double d = det();
        return {(b[0] * a11 - a01 * b[1]) / d, (a00 * b[1] - a10 * b[0]) / d};
    }

    double max_abs() const {
        return std::max(std::max(std::abs(a00), std::abs(a01)), std::max(std::abs(a10), std::abs(a11)));
    }
};

/// Both roots of the monic quadratic x^2 - t x + d, ordered by real part (descending).
inline std::array<std::complex<double>, 2> quadratic_roots(double t, double d) {
    const double half = 0.5 * t;
    const double disc = half * half - d;
    if (disc >= 0.0) {
        const double s = std::sqrt(disc);
        // Avoid cancellation in the smaller-magnitude root.
        const double big = half >= 0.0 ? half + s : half - s;
        const double small = big != 0.0 ? d / big : 0.0;
        std::complex<double> r1(std::max(big, small), 0.0), r2(std::min(big, small), 0.0);
        return {r1, r2};
    }
    const double s = std::sqrt(-disc);
    return {std::complex<double>(half, s), std::complex<double>(half, -s)};
}

}  // namespace dihedral
