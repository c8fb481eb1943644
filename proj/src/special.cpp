#include "ks/special.hpp"

#include <cmath>
#include <stdexcept>

namespace ks {

namespace {

// Lanczos coefficients for g = 7, 9 terms.
constexpr double kLanczos[9] = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kSqrtTwoPi = 2.506628274631000502415765284811045253;

double lanczos_sum(double z) {
    double a = kLanczos[0];
    for (int i = 1; i < 9; ++i) a += kLanczos[i] / (z - 1.0 + i);
    return a;
}

}  // namespace

double gamma_fn(double x) {
    if (std::isnan(x)) return x;
    if (x <= 0.0 && x == std::floor(x))
        throw std::domain_error("gamma_fn: pole at non-positive integer");
    if (x < 0.5) {
        // Reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        return kPi / (std::sin(kPi * x) * gamma_fn(1.0 - x));
    }
    const double t = x + 6.5;
    return kSqrtTwoPi * std::pow(t, x - 0.5) * std::exp(-t) * lanczos_sum(x);
}

double log_gamma(double x) {
    if (!(x > 0.0)) throw std::domain_error("log_gamma: requires x > 0");
    if (x < 0.5) return std::log(kPi / std::sin(kPi * x)) - log_gamma(1.0 - x);
    const double t = x + 6.5;
    return 0.5 * std::log(2.0 * kPi) + (x - 0.5) * std::log(t) - t +
           std::log(lanczos_sum(x));
}

}  // namespace ks
