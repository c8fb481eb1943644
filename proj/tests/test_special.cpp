#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ks/special.hpp"

namespace {

// Independent oracle: Spouge's series with a = 20, accumulated in long double.
double gamma_spouge(double x) {
    constexpr int a = 20;
    if (x < 0.5)
        return M_PI / (std::sin(M_PI * x) * gamma_spouge(1.0 - x));
    const long double z = x - 1.0L;
    long double acc = std::sqrt(2.0L * M_PIl);
    long double fact = 1.0L;
    for (int k = 1; k < a; ++k) {
        const long double ck =
            (k % 2 ? 1.0L : -1.0L) / fact *
            std::pow(static_cast<long double>(a - k), k - 0.5L) *
            std::exp(static_cast<long double>(a - k));
        acc += ck / (z + k);
        fact *= k;
    }
    const long double t = z + a;
    return static_cast<double>(std::pow(t, z + 0.5L) * std::exp(-t) * acc);
}

double rel_err(double got, double want) {
    return std::abs(got - want) / std::abs(want);
}

}  // namespace

TEST_CASE("gamma matches closed-form values") {
    CHECK(rel_err(ks::gamma_fn(0.5), std::sqrt(M_PI)) < 1e-14);
    CHECK(rel_err(ks::gamma_fn(1.0), 1.0) < 1e-14);
    CHECK(rel_err(ks::gamma_fn(2.0), 1.0) < 1e-14);
    CHECK(rel_err(ks::gamma_fn(1.5), 0.5 * std::sqrt(M_PI)) < 1e-14);
    CHECK(rel_err(ks::gamma_fn(5.0), 24.0) < 1e-14);
    CHECK(rel_err(ks::gamma_fn(10.0), 362880.0) < 1e-14);
    CHECK(rel_err(ks::gamma_fn(-0.5), -2.0 * std::sqrt(M_PI)) < 1e-13);
}

TEST_CASE("gamma agrees with two independent evaluations") {
    for (double x = 0.05; x < 30.0; x += 0.173) {
        CAPTURE(x);
        CHECK(rel_err(ks::gamma_fn(x), gamma_spouge(x)) < 1e-12);
        CHECK(rel_err(ks::gamma_fn(x), std::tgamma(x)) < 1e-12);
    }
}

TEST_CASE("gamma rejects poles") {
    CHECK_THROWS_AS(ks::gamma_fn(0.0), std::domain_error);
    CHECK_THROWS_AS(ks::gamma_fn(-3.0), std::domain_error);
}

TEST_CASE("log_gamma agrees with lgamma") {
    for (double x = 0.1; x < 60.0; x += 0.317) {
        CAPTURE(x);
        CHECK(std::abs(ks::log_gamma(x) - std::lgamma(x)) <
              1e-12 * (1.0 + std::abs(std::lgamma(x))));
    }
    CHECK_THROWS_AS(ks::log_gamma(0.0), std::domain_error);
    CHECK_THROWS_AS(ks::log_gamma(-1.5), std::domain_error);
}
