#pragma once

#include <string>
#include <vector>

#include "ks/constants.hpp"
#include "ks/dynamics.hpp"
#include "ks/field.hpp"

namespace ks {

/// Free energy and its barrier decomposition F1 + F2, evaluated on one state.
/// F_eps >= F1 + F2 holds up to quadrature round-off; F2 >= 0 for
/// concentrated, mean-suppressed chemical fields.
struct EnergyReport {
    double F = 0.0;
    double F_eps = 0.0;
    double F1 = 0.0;
    double F2 = 0.0;
    double dissipation = 0.0;
    double cross_term = 0.0;  // integral of (rho * J) c
};

enum class Verdict { subcritical, supercritical_norm, indeterminate };
const char* verdict_name(Verdict v);

struct CriterionVerdict {
    double norm_crit = 0.0;       // ||rho0|| in L^{2n/(n+2)}
    double threshold_norm = 0.0;  // (s*)^{(n-2)/(2n(m-1))}
    double F0 = 0.0;
    double F_star = 0.0;
    Verdict verdict = Verdict::indeterminate;
};

struct DiagnosticsRow {
    double t = 0.0;
    double mass = 0.0;
    double F = 0.0;
    double F_eps = 0.0;
    double F1 = 0.0;
    double F2 = 0.0;
    double dissipation = 0.0;
    double norm_crit = 0.0;
    double norm_m = 0.0;
    double norm_inf = 0.0;
    std::vector<double> moser;  // L^{p_k} norms, k = 1..K
    double clipped_mass = 0.0;
    double dt = 0.0;
};

/// Free energy: integral of rho^m/(m-1) - rho c + |grad c|^2/2 + c^2/2.
double free_energy(const ScalarField& rho, const ScalarField& c,
                   const ModelParams& params);

/// Regularized energy and its decomposition. `mollifier` may be null (no
/// smoothing of the cross term); `c_t` may be null (dissipation reported 0).
EnergyReport free_energy_regularized(const ScalarField& rho, const ScalarField& c,
                                     const ModelParams& params, double epsilon,
                                     const Mollifier* mollifier,
                                     const ScalarField* c_t = nullptr);

/// Entropy production: integral of
/// (rho+eps) |grad( m/(m-1) (rho+eps)^{m-1} - c*J )|^2 + |c_t|^2.
double dissipation(const ScalarField& rho, const ScalarField& c,
                   const ScalarField& c_t, const ModelParams& params,
                   double epsilon, const Mollifier* mollifier);

/// Classifies initial data against the thresholds derived from params.
CriterionVerdict classify(const ScalarField& rho0, const ScalarField& c0,
                          const ModelParams& params);

/// One row per trajectory snapshot, including the L^{p_k} ladder norms.
std::vector<DiagnosticsRow> track(const Trajectory& traj, const ModelParams& params,
                                  double epsilon, const Mollifier& mollifier,
                                  int k_max);

/// CSV with header t,mass,...,moser_p1..K,clipped_mass,dt; shortest
/// round-trip floats so identical runs serialize byte-identically.
std::string diagnostics_csv(const std::vector<DiagnosticsRow>& rows, int k_max);

std::string verdict_json(const CriterionVerdict& v);

}  // namespace ks
