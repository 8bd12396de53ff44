#pragma once

#include <string>
#include <vector>

#include "dihedral/localform.hpp"
#include "dihedral/turing.hpp"

namespace dihedral {

/// One line per predictor explaining what its sign implies.
std::vector<std::string> interpret_predictors(const Predictors& p);

std::string format_steady_report(const SteadyState& s);
std::string format_turing_report(const TuringPoint& tp);
std::string format_predictor_report(const Predictors& p);
std::string format_local_form_report(const LocalForm& lf);

/// (k, max Re omega) on `points` wave numbers in (0, k_max].
struct DispersionSample {
    double k = 0.0, rate = 0.0;
};
std::vector<DispersionSample> dispersion_curve(const ModelSpec& model, const SteadyState& s, double k_max, int points);

}  // namespace dihedral
