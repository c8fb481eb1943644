#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "ks/constants.hpp"

using namespace ks;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

// second evaluation route for the closed forms, via the platform gamma
double sobolev_tgamma(int n) {
    return n * (n - 2.0) / 4.0 * std::pow(2.0, 2.0 / n) *
           std::pow(M_PI, 1.0 + 1.0 / n) * std::pow(std::tgamma((n + 1.0) / 2.0), -2.0 / n);
}
double hls_tgamma(int n) {
    return std::pow(M_PI, (n - 2.0) / 2.0) / std::tgamma(n / 2.0 + 1.0) *
           std::pow(std::tgamma(n / 2.0) / std::tgamma(static_cast<double>(n)), -2.0 / n);
}

}  // namespace

TEST_CASE("critical exponents") {
    auto [mc3, mf3] = critical_exponents(3);
    CHECK(mc3 == doctest::Approx(1.2).epsilon(1e-15));
    CHECK(mf3 == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
    auto [mc4, mf4] = critical_exponents(4);
    CHECK(mc4 == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
    CHECK(mf4 == doctest::Approx(1.5).epsilon(1e-15));
    auto [mc2, mf2] = critical_exponents(2);
    CHECK(mc2 == 1.0);  // the admissible window degenerates at n = 2
    CHECK(mf2 == 1.0);
    CHECK_THROWS(critical_exponents(0));
}

TEST_CASE("Sobolev constant: algebraic value at n = 3 plus dual evaluation") {
    CHECK(rel(sobolev_constant(3), 3.0 * std::pow(M_PI / 2.0, 4.0 / 3.0)) < 1e-12);
    for (int n = 3; n <= 8; ++n) {
        CAPTURE(n);
        CHECK(rel(sobolev_constant(n), sobolev_tgamma(n)) < 1e-10);
    }
    CHECK_THROWS(sobolev_constant(2));
}

TEST_CASE("HLS constant") {
    for (int n = 3; n <= 8; ++n) {
        CAPTURE(n);
        CHECK(rel(hls_constant(n), hls_tgamma(n)) < 1e-10);
    }
    CHECK_THROWS(hls_constant(1));
}

TEST_CASE("Young constant") {
    CHECK(young_Cq(2.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(young_Cq(1.0) == 1.0);
    CHECK(young_Cq(kInf) == 1.0);
    CHECK(rel(young_Cq(4.0), std::pow(4.0, -0.25) * std::pow(3.0, 0.375)) < 1e-14);
    // continuous near the endpoints
    CHECK(std::abs(young_Cq(1.0 + 1e-9) - 1.0) < 1e-6);
    CHECK(std::abs(young_Cq(1e9) - 1.0) < 1e-6);
    // conjugate pairs multiply to one
    for (double q : {1.5, 2.0, 3.0, 7.0}) {
        const double qc = q / (q - 1.0);
        CHECK(rel(young_Cq(q) * young_Cq(qc), 1.0) < 1e-13);
    }
    CHECK_THROWS(young_Cq(0.9));
}

TEST_CASE("semigroup constants") {
    // p = q: r = 1, A = 1 exactly, B = Gamma((n+1)/2)/Gamma(n/2)
    for (double p : {1.0, 2.0, 4.0, kInf}) {
        const auto sc = semigroup_constants(p, p, 3);
        CHECK(sc.r == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(rel(sc.A, 1.0) < 1e-14);
        CHECK(rel(sc.B, std::tgamma(2.0) / std::tgamma(1.5)) < 1e-13);
    }

    // r satisfies 1/r = 1 + 1/p - 1/q in floating point
    for (double q : {1.0, 2.0, 4.0}) {
        for (double p : {4.0, 8.0, kInf}) {
            if (p < q) continue;
            const auto sc = semigroup_constants(p, q, 3);
            const double want = 1.0 + (std::isinf(p) ? 0.0 : 1.0 / p) - 1.0 / q;
            CHECK(std::abs(1.0 / sc.r - want) < 1e-15);
        }
    }

    // dual evaluation of the closed form at p = inf, q = 4, n = 3 (r = 4/3)
    {
        const auto sc = semigroup_constants(kInf, 4.0, 3);
        CHECK(rel(sc.r, 4.0 / 3.0) < 1e-15);
        const double r = 4.0 / 3.0;
        const double cfac = young_Cq(4.0) * young_Cq(r);  // C_inf = 1
        const double a_want = cfac * std::pow(4.0 * M_PI, 1.5 * (1.0 / r - 1.0)) *
                              std::pow(r, -1.5 / r);
        const double b_want = cfac * std::pow(4.0 * M_PI, 1.5 * (1.0 / r - 1.0)) *
                              std::pow(std::tgamma((3.0 + r) / 2.0) / std::tgamma(1.5),
                                       1.0 / r) *
                              std::pow(r, -0.5 - 1.5 / r);
        CHECK(rel(sc.A, a_want) < 1e-12);
        CHECK(rel(sc.B, b_want) < 1e-12);
    }

    // p = inf, q = 1 gives r = inf: A is the heat-kernel sup coefficient
    {
        const auto sc = semigroup_constants(kInf, 1.0, 3);
        CHECK(std::isinf(sc.r));
        CHECK(rel(sc.A, std::pow(4.0 * M_PI, -1.5)) < 1e-13);
        CHECK(rel(sc.B, std::pow(4.0 * M_PI, -1.5) * std::exp(-0.5) / std::sqrt(2.0)) <
              1e-13);
    }

    // continuity in p as p -> q
    const double a_limit = semigroup_constants(2.0, 2.0, 3).A;
    CHECK(std::abs(semigroup_constants(2.0 + 1e-9, 2.0, 3).A - a_limit) < 1e-6);

    CHECK_THROWS(semigroup_constants(2.0, 4.0, 3));  // p < q
    CHECK_THROWS(semigroup_constants(0.5, 0.5, 3));
}

TEST_CASE("barrier function") {
    const ModelParams params{3, 1.25, 1.0};
    CHECK(barrier_f(0.0, params) == 0.0);
    const double s3 = sobolev_constant(3);
    CHECK(rel(barrier_f(1.0, params), 4.0 - 1.0 / (2.0 * s3)) < 1e-14);

    // strict concavity on a log grid and monotonicity around s*
    const ConstantsTable t = thresholds(params);
    for (int i = 0; i < 100; ++i) {
        const double s = std::pow(10.0, -3.0 + 8.0 * i / 99.0) * t.s_star;
        const double h = 1e-3 * s;
        const double second = barrier_f(s + h, params) - 2.0 * barrier_f(s, params) +
                              barrier_f(s - h, params);
        CHECK(second <= 1e-12 * std::abs(barrier_f(s, params)) + 1e-12);
    }
    CHECK(barrier_f(0.5 * t.s_star, params) < barrier_f(0.9 * t.s_star, params));
    CHECK(barrier_f(1.5 * t.s_star, params) < barrier_f(1.1 * t.s_star, params));

    CHECK_THROWS(barrier_f(-1.0, params));
    CHECK_THROWS(barrier_f(1.0, ModelParams{3, 1.5, 1.0}));   // m outside window
    CHECK_THROWS(barrier_f(1.0, ModelParams{3, 1.25, 0.0}));  // zero mass
}

TEST_CASE("thresholds at the reference point") {
    const ModelParams params{3, 1.25, 1.0};
    const ConstantsTable t = thresholds(params);
    const double s3 = sobolev_constant(3);
    CHECK(rel(t.s_star, std::pow(6.0 * s3, 3.0)) < 1e-12);
    CHECK(t.s_star == doctest::Approx(3.551e4).epsilon(2e-3));
    CHECK(rel(t.threshold_norm, std::pow(t.s_star, 2.0 / 3.0)) < 1e-12);
    CHECK(t.threshold_norm == doctest::Approx(1.0803e3).epsilon(1e-3));

    // stationarity of the barrier at s*
    const double h = 1e-4 * t.s_star;
    const double fd =
        (barrier_f(t.s_star + h, params) - barrier_f(t.s_star - h, params)) / (2.0 * h);
    CHECK(std::abs(fd) <= 1e-6 * std::abs(t.F_star) / t.s_star);
    CHECK(std::abs(barrier_f_prime(t.s_star, params)) <=
          1e-12 * std::abs(barrier_f_prime(0.5 * t.s_star, params)));

    CHECK_THROWS(thresholds(ModelParams{3, 1.4, 1.0}));
}

TEST_CASE("F_star equals f(s_star) and the corrected closed form") {
    for (double m : {1.22, 1.25, 1.30}) {
        for (double mass : {0.5, 1.0, 2.0}) {
            CAPTURE(m);
            CAPTURE(mass);
            const ModelParams params{3, m, mass};
            const ConstantsTable t = thresholds(params);
            CHECK(rel(t.F_star, barrier_f(t.s_star, params)) < 1e-10);
            CHECK(rel(t.F_star, f_star_closed_form(params)) < 1e-10);
            CHECK(t.F_star > 0.0);
        }
    }
    // the alternative mass exponent only agrees at mass = 1
    const ModelParams unit{3, 1.25, 1.0};
    CHECK(rel(f_star_closed_form_alt(unit), f_star_closed_form(unit)) < 1e-12);
    const ModelParams two{3, 1.25, 2.0};
    CHECK(rel(f_star_closed_form_alt(two), thresholds(two).F_star) > 1e-3);
    CHECK(rel(f_star_closed_form(two), thresholds(two).F_star) < 1e-10);
}

TEST_CASE("constants table is finite and positive across dimensions") {
    const double ms[3] = {1.25, 1.4, 1.5};  // inside the window for n = 3, 4, 5
    const int ns[3] = {3, 4, 5};
    for (int i = 0; i < 3; ++i) {
        for (double mass : {0.3, 1.0, 7.0}) {
            CAPTURE(ns[i]);
            CAPTURE(mass);
            const ModelParams params{ns[i], ms[i], mass};
            const ConstantsTable t = thresholds(params);
            for (double v : {t.sobolev_S_n, t.hls_C_n, t.m_critical, t.m_fujita,
                             t.s_star, t.F_star, t.threshold_norm}) {
                CHECK(std::isfinite(v));
                CHECK(v > 0.0);
            }
            CHECK(rel(t.F_star, f_star_closed_form(params)) < 1e-10);
        }
    }
}

TEST_CASE("interpolation exponents") {
    const ModelParams params{3, 1.25, 1.0};

    // theta1 vanishes at the window boundary
    const double p_edge = 1.0 + params.m + 6.0 / 5.0;
    CHECK(std::abs(interpolation_exponents(p_edge + 1e-9, params, 3.2).theta1) < 1e-6);

    const ExponentSet e = interpolation_exponents(50.0, params, 3.5);
    for (double th : {e.theta1, e.theta2, e.theta3, e.theta4, e.theta_p1}) {
        CHECK(th > 0.0);
        CHECK(th < 1.0);
    }
    CHECK(std::abs(1.0 / e.q1 + 1.0 / e.q2 - 1.0) < 1e-12);
    CHECK(std::abs(1.0 / e.ell1 + 1.0 / e.ell2 - 1.0) < 1e-12);
    CHECK(e.q1 > 1.0);
    CHECK(e.q2 > 1.0);
    CHECK(e.q2 <= 3.0);
    CHECK(e.k_exp < 2.0);
    CHECK(e.k_exp > 0.0);

    // k < 2 across a p sweep
    for (double p = 5.0; p < 500.0; p *= 1.7)
        CHECK(interpolation_exponents(p, params, 3.5).k_exp < 2.0);

    CHECK_THROWS_WITH_AS(interpolation_exponents(2.0, params, 1.5),
                         doctest::Contains("theta1"), std::domain_error);
    CHECK_THROWS_WITH_AS(interpolation_exponents(50.0, params, 2.0),
                         doctest::Contains("theta3"), std::domain_error);
}

TEST_CASE("ladder exponents keep q2 <= n") {
    const ModelParams params{3, 1.25, 1.0};
    for (int k = 1; k <= 12; ++k) {
        CAPTURE(k);
        const LadderExponents e = ladder_exponents(k, params);
        CHECK(e.theta1 > 0.0);
        CHECK(e.theta1 < 1.0);
        CHECK(std::abs(1.0 / e.q1 + 1.0 / e.q2 - 1.0) < 1e-12);
        CHECK(e.q2 <= 3.0 + 1e-12);
        CHECK(e.q2 > 1.0);
    }
    const ModelParams p4{4, 1.4, 1.0};
    for (int k = 1; k <= 12; ++k) CHECK(ladder_exponents(k, p4).q2 <= 4.0 + 1e-12);
}

TEST_CASE("empirical p0 scan") {
    const ModelParams params{3, 1.25, 1.0};
    const double p0 = empirical_p0(params);
    CHECK(std::isfinite(p0));
    CHECK(p0 > 10.0);
    CHECK(p0 < 1e4);
    const double q = 0.5 * (3.0 + 6.0 / (3.0 - 0.25 * 5.0));
    CHECK(interpolation_exponents(p0 * 1.001, params, q).p_bound_holds);
    CHECK_FALSE(interpolation_exponents(p0 * 0.97, params, q).p_bound_holds);
}

TEST_CASE("moser ladder") {
    CHECK(moser_exponent(1, 3) == 18);
    CHECK(moser_exponent(0, 3) == 17);
    for (int k = 1; k <= 20; ++k) {
        CHECK(moser_exponent(k, 3) - moser_exponent(k - 1, 3) == (1LL << (k - 1)));
        CHECK(moser_exponent(k, 3) > moser_exponent(k - 1, 3));
    }
    const double ratio40 =
        static_cast<double>(moser_exponent(40, 3)) / std::pow(2.0, 40.0);
    CHECK(std::abs(ratio40 - 1.0) < 1e-9);
    CHECK_THROWS(moser_exponent(-1, 3));
}

TEST_CASE("moser final bound and the brute-forced recursion") {
    const int n = 3;
    const double C = 1.2, K = 1.5, y0 = 2.0;
    const double base = moser_final_bound(C, n, 0.0, 1.0);
    CHECK(rel(base, 6.0 * C * std::pow(12.0, 6.0) * std::pow(4.0, 6.0)) < 1e-13);
    CHECK(moser_final_bound(2.0 * C, n, 0.0, 1.0) > base);
    CHECK(moser_final_bound(C, n, 10.0, 1.0) > base);
    CHECK(moser_final_bound(C, n, 0.0, 3.0) > base);

    // iterate log y_k <= log(2 a_k) + max(2 log sup y_{k-1}, 2^k log K)
    const double bound = moser_final_bound(C, n, y0, K);
    double log_y = std::log(y0);
    for (int k = 1; k <= 6; ++k) {
        const double log_ak =
            std::log(3.0 * C) + 2.0 * n * std::log(4.0 * n) + k * n * std::log(4.0);
        log_y = std::log(2.0) + log_ak +
                std::max(2.0 * log_y, std::pow(2.0, k) * std::log(K));
        const double pk = static_cast<double>(moser_exponent(k, n));
        CHECK(std::exp(log_y / pk) <= bound * (1.0 + 1e-12));
    }
}
