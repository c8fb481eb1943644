#pragma once

#include <string>
#include <vector>

#include "ks/config.hpp"
#include "ks/criterion.hpp"
#include "ks/dynamics.hpp"

namespace ks {

struct SimulateResult {
    Trajectory trajectory;
    std::vector<DiagnosticsRow> rows;
    RunManifest manifest;
    std::string csv;  // diagnostics bytes exactly as written
};

/// Runs one configured simulation and writes rho_<step>.ksf / c_<step>.ksf
/// snapshots, diagnostics.csv and manifest.json into out_dir.
SimulateResult simulate_to_dir(const RunConfig& rc, const std::string& config_text,
                               const std::string& out_dir, int k_max = 4);

struct SweepEntry {
    double m = 0.0;
    double mass = 0.0;
    double scale = 1.0;
    std::string dir;
    std::string verdict;
    double max_norm_crit = 0.0;
    double max_norm_inf = 0.0;
    double final_mass = 0.0;
    std::string outcome;  // completed | numerical_blowup_flag | error
};

struct SweepResult {
    std::vector<SweepEntry> entries;  // canonically sorted by (m, mass, scale)
    std::string aggregate_csv;
    bool any_error = false;
};

/// Cartesian sweep over sweep.m / sweep.mass / sweep.scale value lists,
/// executed by up to `jobs` workers into run_### subdirectories. The
/// aggregate is sorted before writing, so it is independent of `jobs`.
SweepResult run_sweep(const std::string& sweep_text, const std::string& out_dir,
                      int jobs);

}  // namespace ks
