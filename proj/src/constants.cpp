#include "ks/constants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "ks/special.hpp"

namespace ks {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

double inv(double p) { return std::isinf(p) ? 0.0 : 1.0 / p; }

[[noreturn]] void reject(const std::string& msg) { throw std::domain_error(msg); }

}  // namespace

void ModelParams::validate_basic() const {
    if (dim < 1) reject("ModelParams: dimension must be >= 1");
    if (!(mass >= 0.0) || !std::isfinite(mass)) reject("ModelParams: mass must be >= 0");
    if (!std::isfinite(m)) reject("ModelParams: m must be finite");
}

void ModelParams::validate_criterion() const {
    validate_basic();
    if (dim < 3) reject("ModelParams: criterion requires dimension >= 3");
    if (!(mass > 0.0)) reject("ModelParams: criterion requires mass > 0");
    const double lo = m_critical(), hi = m_fujita();
    if (!(m > lo && m < hi)) {
        std::ostringstream os;
        os << "ModelParams: m=" << m << " outside admissible window (" << lo << ", "
           << hi << ") for n=" << dim;
        reject(os.str());
    }
}

std::pair<double, double> critical_exponents(int n) {
    if (n <= 0) reject("critical_exponents: n must be >= 1");
    return {2.0 * n / (n + 2.0), 2.0 - 2.0 / n};
}

double sobolev_constant(int n) {
    if (n < 3) reject("sobolev_constant: requires n >= 3");
    return n * (n - 2.0) / 4.0 * std::pow(2.0, 2.0 / n) *
           std::pow(kPi, 1.0 + 1.0 / n) *
           std::pow(gamma_fn((n + 1.0) / 2.0), -2.0 / n);
}

double hls_constant(int n) {
    if (n < 3) reject("hls_constant: requires n >= 3");
    return std::pow(kPi, (n - 2.0) / 2.0) / gamma_fn(n / 2.0 + 1.0) *
           std::pow(gamma_fn(n / 2.0) / gamma_fn(static_cast<double>(n)), -2.0 / n);
}

double young_Cq(double q) {
    if (std::isnan(q) || q < 1.0) reject("young_Cq: requires q >= 1");
    if (std::isinf(q) || q == 1.0) return 1.0;
    return std::exp((1.0 / q - 0.5) * std::log(q) +
                    (0.5 - 0.5 / q) * std::log(q - 1.0));
}

SemigroupConstants semigroup_constants(double p, double q, int n) {
    if (n < 1) reject("semigroup_constants: n must be >= 1");
    if (std::isnan(p) || std::isnan(q) || q < 1.0 || p < 1.0)
        reject("semigroup_constants: requires 1 <= q <= p");
    const double ir = 1.0 + inv(p) - inv(q);  // 1/r
    if (ir > 1.0 + 1e-15) reject("semigroup_constants: requires q <= p");
    if (ir < -1e-15) reject("semigroup_constants: resulting r < 1");
    const double r = ir > 0.0 ? 1.0 / ir : std::numeric_limits<double>::infinity();

    const double cfac = young_Cq(q) * young_Cq(r) / young_Cq(p);
    const double ln4pi = std::log(4.0 * kPi);
    // A = cfac * (4 pi)^{(n/2)(1/r - 1)} * r^{-n/(2r)}
    // B = A * (Gamma((n+r)/2) / Gamma(n/2))^{1/r} * r^{-1/2}
    double lnA, lnB;
    if (std::isinf(r)) {
        lnA = std::log(cfac) - 0.5 * n * ln4pi;
        lnB = lnA - 0.5 * (std::log(2.0) + 1.0);  // limit of the Gamma ratio terms
    } else {
        lnA = std::log(cfac) + 0.5 * n * (ir - 1.0) * ln4pi -
              0.5 * n * ir * std::log(r);
        lnB = lnA + ir * (log_gamma((n + r) / 2.0) - log_gamma(n / 2.0)) -
              0.5 * std::log(r);
    }
    return {std::exp(lnA), std::exp(lnB), r};
}

double barrier_f(double s, const ModelParams& params) {
    params.validate_criterion();
    if (!(s >= 0.0)) reject("barrier_f: requires s >= 0");
    const double n = params.dim, m = params.m;
    const double sn = sobolev_constant(params.dim);
    const double mass_pow = std::pow(params.mass, (2.0 * n - m * (n + 2.0)) / (n - 2.0));
    return mass_pow / (m - 1.0) * s -
           std::pow(s, (n - 2.0) / (n * (m - 1.0))) / (2.0 * sn);
}

double barrier_f_prime(double s, const ModelParams& params) {
    params.validate_criterion();
    if (!(s > 0.0)) reject("barrier_f_prime: requires s > 0");
    const double n = params.dim, m = params.m;
    const double sn = sobolev_constant(params.dim);
    const double gamma = (n - 2.0) / (n * (m - 1.0));
    const double mass_pow = std::pow(params.mass, (2.0 * n - m * (n + 2.0)) / (n - 2.0));
    return mass_pow / (m - 1.0) - gamma * std::pow(s, gamma - 1.0) / (2.0 * sn);
}

ConstantsTable thresholds(const ModelParams& params) {
    params.validate_criterion();
    const double n = params.dim, m = params.m;
    ConstantsTable t;
    t.sobolev_S_n = sobolev_constant(params.dim);
    t.hls_C_n = hls_constant(params.dim);
    t.m_critical = params.m_critical();
    t.m_fujita = params.m_fujita();
    const double mass_pow = std::pow(params.mass, (2.0 * n - m * (n + 2.0)) / (n - 2.0));
    t.s_star = std::pow(2.0 * t.sobolev_S_n * n / (n - 2.0) * mass_pow,
                        n * (m - 1.0) / (2.0 * n - 2.0 - m * n));
    t.F_star = barrier_f(t.s_star, params);
    t.threshold_norm = std::pow(t.s_star, (n - 2.0) / (2.0 * n * (m - 1.0)));
    return t;
}

double f_star_closed_form(const ModelParams& params) {
    params.validate_criterion();
    const double n = params.dim, m = params.m;
    const double d = 2.0 * n - 2.0 - m * n;
    return d / ((m - 1.0) * (n - 2.0)) *
           std::pow(params.mass, (2.0 * n - m * n - 2.0 * m) / d) *
           std::pow(2.0 * n * sobolev_constant(params.dim) / (n - 2.0),
                    n * (m - 1.0) / d);
}

double f_star_closed_form_alt(const ModelParams& params) {
    params.validate_criterion();
    const double n = params.dim, m = params.m;
    const double d = 2.0 * n - 2.0 - m * n;
    return d / ((m - 1.0) * (n - 2.0)) *
           std::pow(params.mass, (2.0 * n - m * n - 2.0 * n) / d) *
           std::pow(2.0 * n * sobolev_constant(params.dim) / (n - 2.0),
                    n * (m - 1.0) / d);
}

ExponentSet interpolation_exponents(double p, const ModelParams& params, double q) {
    params.validate_criterion();
    const double n = params.dim, m = params.m;
    if (!std::isfinite(p) || !std::isfinite(q))
        reject("interpolation_exponents: p, q must be finite");
    if (!(p > 1.0 + m + 2.0 * n / (n + 2.0)))
        reject("interpolation_exponents: theta1 window requires p > 1+m+2n/(n+2)");
    if (!(p > m + (n - 2.0) / (n + 2.0)))
        reject("interpolation_exponents: theta2 window requires p > m+(n-2)/(n+2)");
    if (!(q > n && q < p))
        reject("interpolation_exponents: theta3 window requires n < q < p");
    if (!(p > 2.0 * n / (n + 2.0)))
        reject("interpolation_exponents: theta4 window requires p > 2n/(n+2)");

    const double half = (n + 2.0) / (2.0 * n);
    const double denom = half - (n - 2.0) / (n * (m + p - 1.0));
    ExponentSet e;
    e.theta1 = (half - 1.0 / (p - 1.0 - m)) / denom;
    e.theta2 = (half - 1.0 / (p + 1.0 - m)) / denom;
    e.theta3 = (half - 1.0 / q) / (half - 1.0 / p);
    e.theta4 = (half - 1.0 / p) / denom;
    e.q2 = (m + p - 1.0) / (e.theta1 * (p - 1.0 - m));
    e.q1 = e.q2 / (e.q2 - 1.0);
    e.ell2 = (m + p - 1.0) / (e.theta2 * (p + 1.0 - m));
    e.ell1 = e.ell2 / (e.ell2 - 1.0);
    e.theta_p1 = (half - 1.0 / (p + 1.0)) / denom;
    e.k_exp = 2.0 * e.theta_p1 * (p + 1.0) / (m + p - 1.0);
    e.two_ell1_theta3 = 2.0 * e.ell1 * e.theta3;
    e.p_bound_holds = e.two_ell1_theta3 < p;
    return e;
}

LadderExponents ladder_exponents(int k, const ModelParams& params) {
    params.validate_criterion();
    if (k < 1) reject("ladder_exponents: requires k >= 1");
    const double n = params.dim, m = params.m;
    const double pk = static_cast<double>(moser_exponent(k, params.dim));
    const double pk1 = static_cast<double>(moser_exponent(k - 1, params.dim));
    LadderExponents e;
    e.theta1 = (1.0 / pk1 - 1.0 / (pk + 1.0 - m)) /
               (1.0 / pk1 - (n - 2.0) / (n * (m + pk - 1.0)));
    e.q1 = (m + pk - 1.0) / (e.theta1 * (pk + 1.0 - m));
    e.q2 = e.q1 / (e.q1 - 1.0);
    return e;
}

std::int64_t moser_exponent(int k, int n) {
    if (k < 0) reject("moser_exponent: requires k >= 0");
    if (n < 1) reject("moser_exponent: requires n >= 1");
    if (k > 60) reject("moser_exponent: k too large for 64-bit arithmetic");
    return (std::int64_t{1} << k) + 4 * std::int64_t{n} + 4;
}

double moser_final_bound(double C, int n, double sup_y0, double K) {
    if (!(C > 0.0)) reject("moser_final_bound: requires C > 0");
    if (!(sup_y0 >= 0.0)) reject("moser_final_bound: requires sup_y0 >= 0");
    if (!(K >= 1.0)) reject("moser_final_bound: requires K >= 1");
    if (n < 1) reject("moser_final_bound: requires n >= 1");
    return 6.0 * C * std::pow(4.0 * n, 2.0 * n) * std::pow(4.0, 2.0 * n) *
           std::max(sup_y0, K);
}

double empirical_p0(const ModelParams& params) {
    params.validate_criterion();
    const double n = params.dim, m = params.m;
    const double q_hi = 2.0 * n / (n - (m - 1.0) * (n + 2.0));
    const double q = 0.5 * (n + q_hi);
    auto holds = [&](double p) {
        return interpolation_exponents(p, params, q).p_bound_holds;
    };
    const double p_lo = std::max({10.0, 1.0 + m + 2.0 * n / (n + 2.0) + 1e-9, q + 1e-9});
    std::vector<double> ps;
    for (double p = p_lo; p <= 1e4; p *= 1.02) ps.push_back(p);
    std::ptrdiff_t last_fail = -1;
    for (std::size_t i = 0; i < ps.size(); ++i)
        if (!holds(ps[i])) last_fail = static_cast<std::ptrdiff_t>(i);
    if (last_fail + 1 == static_cast<std::ptrdiff_t>(ps.size()))
        return std::numeric_limits<double>::quiet_NaN();  // no onset in range
    if (last_fail < 0) return p_lo;  // holds over the whole scan
    double lo = ps[last_fail], hi = ps[last_fail + 1];
    for (int it = 0; it < 80 && hi - lo > 1e-9 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (holds(mid) ? hi : lo) = mid;
    }
    return hi;
}

}  // namespace ks
