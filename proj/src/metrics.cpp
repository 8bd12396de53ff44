#include "dihedral/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace dihedral {

int count_components(const std::vector<char>& mask, int n) {
    std::vector<int> label(mask.size(), 0);
    std::vector<std::size_t> stack;
    int count = 0;
    for (std::size_t start = 0; start < mask.size(); ++start) {
        if (!mask[start] || label[start]) continue;
        ++count;
        label[start] = count;
        stack.push_back(start);
        while (!stack.empty()) {
            const std::size_t k = stack.back();
            stack.pop_back();
            const int i = static_cast<int>(k % n), j = static_cast<int>(k / n);
            const int nb[4][2] = {{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}};
            for (const auto& p : nb) {
                if (p[0] < 0 || p[0] >= n || p[1] < 0 || p[1] >= n) continue;
                const std::size_t q = static_cast<std::size_t>(p[1]) * n + p[0];
                if (mask[q] && !label[q]) {
                    label[q] = count;
                    stack.push_back(q);
                }
            }
        }
    }
    return count;
}

double trapezoid_mean(const std::vector<double>& w, int n) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) {
        const double wy = (j == 0 || j == n - 1) ? 0.5 : 1.0;
        for (int i = 0; i < n; ++i) {
            const double wx = (i == 0 || i == n - 1) ? 0.5 : 1.0;
            s += wx * wy * w[static_cast<std::size_t>(j) * n + i];
        }
    }
    return s / ((n - 1.0) * (n - 1.0));
}

PatternMetrics pattern_metrics(const Field2D& f, double u_bg, double v_bg, const MetricOptions& opt) {
    PatternMetrics pm;
    const std::size_t size = f.size();
    for (std::size_t k = 0; k < size; ++k) pm.amplitude = std::max(pm.amplitude, std::abs(f.u[k] - u_bg));
    const int c = f.n / 2;
    pm.centre_deviation = f.u[f.index(c, c)] - u_bg;
    if (pm.amplitude == 0.0) return pm;

    const double cut = opt.threshold * pm.amplitude;
    std::vector<char> low(size), high(size);
    double suv = 0.0, suu = 0.0, svv = 0.0;
    for (int j = 0; j < f.n; ++j)
        for (int i = 0; i < f.n; ++i) {
            const std::size_t k = f.index(i, j);
            const double du = f.u[k] - u_bg, dv = f.v[k] - v_bg;
            low[k] = du < -cut;
            high[k] = du > cut;
            if (low[k]) pm.radius = std::max(pm.radius, std::hypot(f.coord(i), f.coord(j)));
            if (low[k] || high[k]) {
                suv += du * dv;
                suu += du * du;
                svv += dv * dv;
            }
        }
    pm.gaps = count_components(low, f.n);
    pm.peaks = count_components(high, f.n);
    if (suu > 0.0 && svv > 0.0) pm.correlation = suv / std::sqrt(suu * svv);
    pm.correlation_sign = (pm.correlation > 0.0) - (pm.correlation < 0.0);
    return pm;
}

}  // namespace dihedral
