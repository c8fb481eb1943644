#pragma once

namespace ks {

/// Gamma function for real x (poles at 0, -1, -2, ... raise std::domain_error).
/// Lanczos approximation (g = 7, 9 terms) with the reflection formula for
/// x < 0.5; relative accuracy is about 1e-14 over the ranges used here.
double gamma_fn(double x);

/// log Gamma(x) for x > 0.
double log_gamma(double x);

}  // namespace ks
