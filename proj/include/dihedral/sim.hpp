#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dihedral/expr.hpp"
#include "dihedral/kernels.hpp"
#include "dihedral/linalg2.hpp"
#include "dihedral/model.hpp"
#include "dihedral/profile.hpp"
#include "dihedral/program.hpp"

namespace dihedral {

/// The model rewritten with diagonal diffusion through uhat = u,
/// vhat = v - mix u, mix = beta D_v / (D_v - 1):
/// uhat_t = Lap uhat + F1, vhat_t = D_v Lap vhat + F2.
struct DiagonalSystem {
    double D_v = 1.0;
    double mix = 0.0;
    Expr F1, F2;               // in (u, v) = (uhat, vhat)
    Program p1, p2;

    Vec2 forward(double u, double v) const { return {u, v - mix * u}; }
    Vec2 inverse(double uh, double vh) const { return {uh, vh + mix * uh}; }
};

/// Throws InputError when D_v = 1 and beta != 0.
DiagonalSystem diagonalize(const ModelSpec& model);

struct SimConfig {
    double dt = 0.1;
    double t_end = 0.0;
    std::vector<double> snapshot_times;   // sorted, within [0, t_end]
    int n_grid = 128;
    double L = 0.0;
    double mu = 0.0;
    bool parallel = true;
    double blowup = 1e8;
};

using SnapshotSink = std::function<void(double t, const Field2D& f)>;

struct SimResult {
    Field2D final;                  // physical (u, v)
    double t_final = 0.0;
    std::vector<double> snapshot_times;   // times actually delivered (nearest step)
    bool aborted = false;
    std::string abort_reason;
};

/// ETD-RDP integration: each step solves
///   U* = S (U + dt F(U)),  U' = R (U + dt/2 F(U)) + dt/2 F(U*)
/// with S = (I + dt D T_x)^{-1} (I + dt D T_y)^{-1} and R the split
/// real-distinct-pole approximation of exp(-dt D T). On blow-up (|value| >
/// cfg.blowup or NaN) the run stops and `final` holds the last good state.
SimResult run(const ModelSpec& model, const Field2D& init, const SimConfig& cfg, const SnapshotSink& sink = {});

/// Single integrator object for callers that step manually.
class Integrator {
public:
    Integrator(const ModelSpec& model, const Field2D& init, double dt, double mu, bool parallel);
    /// Returns false (state unchanged) if the step would blow up.
    bool step(double blowup = 1e8);
    Field2D field() const;
    double time() const { return t_; }
    long steps() const { return steps_; }

private:
    DiagonalSystem sys_;
    int n_;
    double L_, dt_, mu_, t_ = 0.0;
    long steps_ = 0;
    bool parallel_;
    LineSolver full_[2], third_[2], quarter_[2];
    std::vector<double> w_[2], f_[2], star_[2], fs_[2], next_[2], scratch_;
};

}  // namespace dihedral
