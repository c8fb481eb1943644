#pragma once

#include <cstdint>
#include <utility>

namespace ks {

/// Model parameters: spatial dimension, diffusion exponent, and total mass.
/// The admissible diffusion window is 2n/(n+2) < m < 2 - 2/n; criterion-side
/// operations require dim >= 3 and reject m outside the window.
struct ModelParams {
    int dim = 3;
    double m = 1.25;
    double mass = 1.0;

    double m_critical() const { return 2.0 * dim / (dim + 2.0); }
    double m_fujita() const { return 2.0 - 2.0 / dim; }

    void validate_basic() const;      // dim >= 1, mass >= 0, finite m
    void validate_criterion() const;  // dim >= 3, mass > 0, m in the window
};

/// Closed-form constants for a given (n, m, M0).
struct ConstantsTable {
    double sobolev_S_n = 0.0;
    double hls_C_n = 0.0;
    double m_critical = 0.0;
    double m_fujita = 0.0;
    double s_star = 0.0;
    double F_star = 0.0;          // defined operationally as f(s_star)
    double threshold_norm = 0.0;  // (s_star)^{(n-2)/(2n(m-1))}
};

/// Interpolation exponents used by the L^p estimate machinery.
struct ExponentSet {
    double theta1 = 0.0, theta2 = 0.0, theta3 = 0.0, theta4 = 0.0;
    double q1 = 0.0, q2 = 0.0, ell1 = 0.0, ell2 = 0.0;
    double theta_p1 = 0.0;  // exponent of the L^{p+1} interpolation
    double k_exp = 0.0;     // 2*theta_p1*(p+1)/(m+p-1), always < 2
    double two_ell1_theta3 = 0.0;
    bool p_bound_holds = false;  // 2*ell1*theta3 < p
};

/// Ladder-normalized exponents at p = p_k against the previous rung p_{k-1}.
struct LadderExponents {
    double theta1 = 0.0;
    double q1 = 0.0;
    double q2 = 0.0;  // stays <= n throughout the ladder
};

struct SemigroupConstants {
    double A = 0.0;  // value estimate constant
    double B = 0.0;  // gradient estimate constant
    double r = 0.0;  // Young exponent, 1/r = 1 + 1/p - 1/q
};

/// (m_c, m_fujita) = (2n/(n+2), 2 - 2/n). Rejects n <= 0.
std::pair<double, double> critical_exponents(int n);

/// Best constant S_n in S_n ||u||^2_{2n/(n-2)} <= ||grad u||^2_2, n >= 3.
double sobolev_constant(int n);

/// Best constant of the Hardy-Littlewood-Sobolev inequality, n >= 3.
double hls_constant(int n);

/// Sharp Young constant C_q = q^{1/q-1/2} (q-1)^{1/2-1/(2q)}; C_1 = C_inf = 1.
double young_Cq(double q);

/// Heat-kernel convolution constants A_{p,q,n}, B_{p,q,n} for
///   ||e^{tL} f||_p      <= A t^{-(n/2)(1/q-1/p)}     ||f||_q
///   ||grad e^{tL} f||_p <= B t^{-1/2-(n/2)(1/q-1/p)} ||f||_q
/// with 1 <= q <= p <= inf. Evaluated in log space; p or q may be infinite.
SemigroupConstants semigroup_constants(double p, double q, int n);

/// Concave barrier f(s) = M0^{(2n-m(n+2))/(n-2)} s/(m-1) - s^{(n-2)/(n(m-1))}/(2 S_n).
double barrier_f(double s, const ModelParams& params);
/// d/ds of the barrier, closed form.
double barrier_f_prime(double s, const ModelParams& params);

/// All thresholds for given params; F_star is computed as f(s_star).
ConstantsTable thresholds(const ModelParams& params);

/// F_star by the algebraic closed form (mass exponent (2n-mn-2m)/(2n-2-mn)).
double f_star_closed_form(const ModelParams& params);
/// Variant with mass exponent -mn/(2n-2-mn); kept for cross-checking only,
/// it does NOT agree with f(s_star) unless mass == 1.
double f_star_closed_form_alt(const ModelParams& params);

/// Exponents at integrability level p with auxiliary exponent q (n < q < p).
/// Rejects arguments outside each exponent's validity window and names the
/// window that failed.
ExponentSet interpolation_exponents(double p, const ModelParams& params, double q);

/// Ladder exponents at rung k >= 1 (p = 2^k + 4n + 4 against the previous rung).
LadderExponents ladder_exponents(int k, const ModelParams& params);

/// p_k = 2^k + 4n + 4. Rejects k < 0 or n < 1.
std::int64_t moser_exponent(int k, int n);

/// k-independent cap on the L^{p_k} ladder: 6 C (4n)^{2n} 4^{2n} max(sup_y0, K).
double moser_final_bound(double C, int n, double sup_y0, double K);

/// Smallest p (found by scan + bisection over [10, 1e4]) past which
/// 2*ell1*theta3 < p holds, with q at the midpoint of its admissible window.
/// Returns NaN when no onset is bracketed in the scan range.
double empirical_p0(const ModelParams& params);

}  // namespace ks
