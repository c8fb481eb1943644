#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ks/constants.hpp"
#include "ks/field.hpp"

namespace ks {

struct SimState {
    ScalarField rho;
    ScalarField c;
    double t = 0.0;
    std::int64_t step_count = 0;
};

enum class Scheme { explicit_rho_implicit_c, fully_explicit };

struct SolverConfig {
    double epsilon = 0.0;     // flux regularization; 0 is allowed
    Mollifier mollifier;      // width 0 means 2*dx
    bool mollify = true;      // apply J to the drift and the c source
    bool chemotaxis = true;   // test hook: false freezes the drift at zero
    bool freeze_rho = false;  // test hook: skip the transport update entirely
    double dt_init = 1e-2;    // ceiling for every step
    double t_end = 1.0;
    double cfl_safety = 0.4;  // in (0, 1]
    int snapshot_every = 10;  // steps between snapshots
    Scheme scheme = Scheme::explicit_rho_implicit_c;
    std::uint64_t seed = 0;
};

struct InitSpec {
    enum class Kind { gaussian_blob, two_blobs, file, zero };
    enum class C0 { resolvent, zero };

    Kind kind = Kind::gaussian_blob;
    double sigma = 1.0;
    double separation = 4.0;      // two_blobs: center distance along axis 0
    double mass = 1.0;            // requested M0 before any amplitude scaling
    double scale = 1.0;           // post-normalization amplitude factor
    double norm_fraction = 0.0;   // if > 0: scale so that the critical-norm
                                  // ratio against thresholds(params) equals it
    std::string file;             // KSF1 path for Kind::file
    C0 c0 = C0::resolvent;
};

/// Builds (rho0, c0). Gaussian variants are normalized so mass(rho0) equals
/// init.mass exactly before amplitude scaling is applied.
std::pair<ScalarField, ScalarField> initial_data(const GridSpec& g,
                                                 const InitSpec& init,
                                                 const ModelParams& params);

/// Stability rule: cfl_safety * min(diffusive cap, advective cap), further
/// capped by dt_init (and by dt_cap inside step()).
double choose_dt(const SimState& state, const SolverConfig& cfg,
                 const ModelParams& params);

struct StepResult {
    SimState state;
    double dt = 0.0;
    double clipped_mass = 0.0;  // mass added by clipping round-off negatives
    bool blowup = false;        // numerical blow-up indicator, not a crash
    std::string error;          // set on hard failures (invalid negativity)
};

/// One operator-split step: explicit conservative finite-volume transport of
/// rho (upwind advection with a per-cell outflow limiter, centered degenerate
/// diffusion), then the chemical update. Mass telescopes to round-off.
StepResult step(const SimState& state, const SolverConfig& cfg,
                const ModelParams& params, double dt_cap);

struct Snapshot {
    SimState state;
    double dt_last = 0.0;            // dt of the step that produced this state
    double clipped_since_last = 0.0;
    ScalarField c_t;                 // backward difference of c over the last step
    bool warmup = true;              // true on the initial snapshot (c_t is zero)
    double edge_fraction = 0.0;
};

enum class RunOutcome { completed, numerical_blowup_flag };

struct Trajectory {
    std::vector<Snapshot> snapshots;
    RunOutcome outcome = RunOutcome::completed;
    double fail_time = 0.0;  // meaningful when flagged
    bool edge_warning = false;
    double total_clipped = 0.0;
};

/// Integrates to t_end (or the blow-up flag), snapshotting every
/// snapshot_every steps plus the initial and final states.
Trajectory run(const SolverConfig& cfg, const ModelParams& params,
               const ScalarField& rho0, const ScalarField& c0);

}  // namespace ks
