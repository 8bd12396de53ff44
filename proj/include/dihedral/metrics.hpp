#pragma once

#include <vector>

#include "dihedral/profile.hpp"

namespace dihedral {

struct PatternMetrics {
    double amplitude = 0.0;          // max |u - u_bg|
    double centre_deviation = 0.0;   // u - u_bg at the node nearest the origin
    int gaps = 0;                    // 4-connected regions with u < u_bg - threshold * amplitude
    int peaks = 0;                   // same with u > u_bg + threshold * amplitude
    double radius = 0.0;             // distance from the origin of the outermost gap node
    double correlation = 0.0;        // normalized sum of du dv over |du| > threshold * amplitude
    int correlation_sign = 0;
};

struct MetricOptions {
    double threshold = 0.1;          // fraction of the amplitude
};

PatternMetrics pattern_metrics(const Field2D& f, double u_bg, double v_bg, const MetricOptions& opt = {});

/// Number of 4-connected components of `mask` (n x n, row-major).
int count_components(const std::vector<char>& mask, int n);

/// Trapezoidal mean over the square; exact invariant of the Neumann scheme's
/// pure-diffusion operator.
double trapezoid_mean(const std::vector<double>& w, int n);

}  // namespace dihedral
