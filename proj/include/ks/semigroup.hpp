#pragma once

#include <cstdint>
#include <vector>

#include "ks/field.hpp"

namespace ks {

/// One verified instance of a heat-semigroup estimate: lhs is the measured
/// norm, rhs the constant times the time power times the input norm. The
/// estimates are inequalities, so ratio <= 1 (+ round-off) on every instance.
struct SemigroupEstimateReport {
    double p = 0.0;
    double q = 0.0;
    double t = 0.0;
    bool gradient = false;
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
};

/// e^{t Lap} f via the spectral multiplier exp(-|k|^2 t); t = 0 is identity.
ScalarField heat_evolve(const ScalarField& f, double t);

/// Solves -Lap c + c = rho spectrally.
ScalarField resolvent(const ScalarField& rho);

/// Damped Duhamel solution c(t) = e^{-t} e^{t Lap} c0
/// + int_0^t e^{s-t} e^{(t-s) Lap} rho(s) ds with the integral discretized by
/// the trapezoid rule on the uniform sample lattice s_j = j * sample_dt.
/// The samples must cover [0, t] exactly: (samples-1) * sample_dt == t.
ScalarField mild_solution_c(const ScalarField& c0,
                            const std::vector<ScalarField>& rho_samples,
                            double sample_dt, double t);

/// Checks ||e^{tL} f||_p <= A t^{-(n/2)(1/q-1/p)} ||f||_q (value), or the
/// gradient analogue with B and an extra t^{-1/2} (gradient).
SemigroupEstimateReport verify_estimate_heat(const ScalarField& f, double p,
                                             double q, double t, bool gradient);

/// Checks ||grad c(t)||_inf <= ||grad c0||_inf
/// + B_{inf,q,n} Gamma(1/2 - n/(2q)) ||f||_q for constant-in-time forcing f,
/// at each requested time. Requires q > n.
std::vector<SemigroupEstimateReport> verify_estimate_damped(
    const ScalarField& c0, const ScalarField& forcing, double q,
    const std::vector<double>& times);

/// Periodized Gaussian of total mass `total`, centered at `center` (may be
/// null for the box center), discretely normalized.
ScalarField gaussian_blob(const GridSpec& g, const double* center, double sigma,
                          double total);

/// Deterministic battery of verify_estimate_heat instances over Gaussians
/// with seeded widths/centers, p,q in {2,4,inf} (q <= p), t in {0.1,0.5,2}.
std::vector<SemigroupEstimateReport> estimate_battery(const GridSpec& g,
                                                      int count,
                                                      std::uint64_t seed);

}  // namespace ks
