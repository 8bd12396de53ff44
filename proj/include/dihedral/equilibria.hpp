#pragma once

#include <optional>
#include <vector>

#include "dihedral/linalg2.hpp"
#include "dihedral/model.hpp"

namespace dihedral {

struct SteadyState {
    double u = 0.0, v = 0.0, mu = 0.0;
    double residual = 0.0;  // max(|f|, |g|)
};

inline constexpr double kSteadyTol = 1e-10;

struct SteadyOptions {
    double u_max = 10.0, v_max = 10.0;
    int lattice = 8;               // lattice points per axis for default seeds
    bool reject_negative = true;   // drop states with u < 0 or v < 0
    double dedup_distance = 1e-6;
};

struct SteadySearch {
    std::vector<SteadyState> states;
    int failed_seeds = 0;          // seeds whose Newton run did not converge
};

/// Damped Newton for f = g = 0 at fixed mu. Returns nothing on failure.
/// Converged states are polished past kSteadyTol to near machine precision.
std::optional<SteadyState> solve_steady(const ModelSpec& model, double mu, Vec2 guess, int max_iter = 50);

std::vector<Vec2> lattice_seeds(const SteadyOptions& opt = {});

/// Deduplicated steady states from each seed (lattice_seeds() when `seeds` is empty).
SteadySearch find_steady_states(const ModelSpec& model, double mu, const std::vector<Vec2>& seeds,
                                const SteadyOptions& opt = {});

/// Follows the branch through `from` to mu_new with adaptive substeps and a
/// tangent predictor. Throws BranchEndError at a fold or when Newton keeps failing.
SteadyState continue_branch(const ModelSpec& model, const SteadyState& from, double mu_new, int max_halvings = 14);

struct BranchWalk {
    SteadyState reached;   // last state resolved on the branch
    bool complete = false; // reached.mu == mu_new
};

/// Like continue_branch but reports how far it got instead of throwing.
BranchWalk walk_branch(const ModelSpec& model, const SteadyState& from, double mu_new, int max_halvings = 14);

/// Branch derivative (du/dmu, dv/dmu) = -J^{-1} dF/dmu.
Vec2 branch_tangent(const ModelSpec& model, const SteadyState& s);

}  // namespace dihedral
