#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "ks/constants.hpp"
#include "ks/dynamics.hpp"
#include "ks/semigroup.hpp"
#include "test_util.hpp"

using namespace ks;
using ks_test::rel_l2_diff;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("heat evolution: identity, Gaussian widening, mass") {
    const GridSpec g(3, 64, 20.0);
    const ScalarField f = gaussian_blob(g, nullptr, 1.0, 1.0);

    const ScalarField same = heat_evolve(f, 0.0);
    CHECK(rel_l2_diff(same, f) == 0.0);

    // variance 1 -> variance 1 + 2t
    const double t = 0.5;
    const ScalarField evolved = heat_evolve(f, t);
    const ScalarField want = gaussian_blob(g, nullptr, std::sqrt(1.0 + 2.0 * t), 1.0);
    CHECK(rel_l2_diff(evolved, want) < 1e-6);

    CHECK(std::abs(mass(evolved) - mass(f)) < 1e-12 * mass(f));
    CHECK(min_value(evolved) > -1e-12 * max_value(evolved));
    CHECK_THROWS(heat_evolve(f, -0.1));
}

TEST_CASE("semigroup property") {
    const GridSpec g(3, 32, 20.0);
    const ScalarField f = gaussian_blob(g, nullptr, 1.1, 1.0);
    const ScalarField two_hop = heat_evolve(heat_evolve(f, 0.2), 0.3);
    const ScalarField one_hop = heat_evolve(f, 0.5);
    CHECK(rel_l2_diff(two_hop, one_hop) < 1e-10);
}

TEST_CASE("resolvent solves its equation") {
    const GridSpec g(3, 32, 15.0);
    const ScalarField rho = gaussian_blob(g, nullptr, 1.0, 2.0);
    const ScalarField c = resolvent(rho);
    CHECK(rel_l2_diff(c - laplacian(c), rho) < 1e-10);
}

TEST_CASE("mild solution: zero forcing, trapezoid refinement, steady state") {
    const GridSpec g(3, 24, 15.0);
    const ScalarField c0 = gaussian_blob(g, nullptr, 1.3, 1.0);
    const ScalarField rho = gaussian_blob(g, nullptr, 0.9, 1.5);

    // rho = 0: pure damped heat flow
    const double t = 0.7;
    std::vector<ScalarField> zeros(8, ScalarField(g));
    const ScalarField got = mild_solution_c(c0, zeros, t / 7.0, t);
    const ScalarField want = std::exp(-t) * heat_evolve(c0, t);
    CHECK(rel_l2_diff(got, want) < 1e-12);

    // constant-in-time forcing: second-order refinement toward the closed form
    const auto& k2 = k2_table(g);
    auto rho_hat = spectrum(rho);
    auto c0_hat = spectrum(c0);
    std::vector<std::complex<double>> exact_hat(rho_hat.size());
    for (std::size_t i = 0; i < exact_hat.size(); ++i) {
        const double lam = 1.0 + k2[i];
        exact_hat[i] = std::exp(-lam * t) * c0_hat[i] +
                       (1.0 - std::exp(-lam * t)) / lam * rho_hat[i];
    }
    const ScalarField exact = field_from_spectrum(g, std::move(exact_hat));
    double errs[2];
    int slot = 0;
    for (int steps : {20, 40}) {
        std::vector<ScalarField> samples(steps + 1, rho);
        errs[slot++] =
            rel_l2_diff(mild_solution_c(c0, samples, t / steps, t), exact);
    }
    CHECK(errs[0] / errs[1] > 3.5);
    CHECK(errs[0] / errs[1] < 4.5);

    // gap in the lattice is rejected
    CHECK_THROWS(mild_solution_c(c0, zeros, 0.05, t));
}

TEST_CASE("mild solution settles onto the resolvent") {
    // 1-D grid keeps 40k trapezoid samples cheap; the quadrature must beat
    // 1e-6, which needs dt well under a millisecond of model time
    const GridSpec g(1, 64, 10.0);
    const ScalarField rho = gaussian_blob(g, nullptr, 1.0, 1.0);
    const double t = 16.0;
    const int steps = 40000;
    std::vector<ScalarField> samples(steps + 1, rho);
    const ScalarField settled =
        mild_solution_c(ScalarField(g), samples, t / steps, t);
    CHECK(rel_l2_diff(settled, resolvent(rho)) < 1e-6);
}

TEST_CASE("mild solution cross-checks the implicit chemical stepper") {
    const GridSpec g(3, 16, 10.0);
    const ScalarField rho = gaussian_blob(g, nullptr, 1.2, 1.0);

    SolverConfig cfg;
    cfg.freeze_rho = true;
    cfg.mollify = false;
    cfg.chemotaxis = false;
    cfg.epsilon = 0.0;
    const double t = 0.2, dt = 1e-4;
    const int steps = static_cast<int>(std::round(t / dt));
    cfg.dt_init = dt;
    cfg.t_end = t;
    const ModelParams params{3, 1.25, 1.0};

    SimState state{rho, ScalarField(g), 0.0, 0};
    for (int i = 0; i < steps; ++i) {
        auto res = step(state, cfg, params, 1e9);
        REQUIRE(res.error.empty());
        state = std::move(res.state);
    }
    std::vector<ScalarField> samples(steps + 1, rho);
    const ScalarField mild = mild_solution_c(ScalarField(g), samples, dt, t);
    CHECK(rel_l2_diff(state.c, mild) < 1e-4);
}

TEST_CASE("heat estimate instances") {
    const GridSpec g(3, 64, 20.0);
    const ScalarField f = gaussian_blob(g, nullptr, 1.2, 1.0);

    for (double sigma : {1.0, 1.3}) {
        const ScalarField blob = gaussian_blob(g, nullptr, sigma, 1.0);
        for (double t : {0.1, 0.5, 2.0}) {
            const auto value = verify_estimate_heat(blob, 2.0, 2.0, t, false);
            CHECK(value.ratio <= 1.0 + 1e-6);
            const auto grad = verify_estimate_heat(blob, kInf, 4.0, t, true);
            CHECK(grad.ratio <= 1.0 + 1e-6);
        }
    }

    // t -> 0 with p > q: the right side diverges and the ratio drains away
    const auto small_t = verify_estimate_heat(f, 4.0, 2.0, 1e-4, false);
    const auto smaller_t = verify_estimate_heat(f, 4.0, 2.0, 1e-6, false);
    CHECK(small_t.ratio < 0.1);
    CHECK(smaller_t.ratio < small_t.ratio / 3.0);

    CHECK_THROWS(verify_estimate_heat(f, 2.0, 4.0, 0.5, false));  // p < q
    CHECK_THROWS(verify_estimate_heat(f, 4.0, 2.0, 0.0, false));
}

TEST_CASE("damped gradient estimate") {
    const GridSpec g(3, 48, 20.0);
    const std::vector<double> times{0.05, 0.2, 0.5, 1.0, 2.0, 5.0};

    // zero forcing: the gradient sup never exceeds its initial value
    const ScalarField c0 = gaussian_blob(g, nullptr, 1.1, 1.0);
    ScalarField zero(g);
    for (const auto& rep : verify_estimate_damped(c0, zero, 4.0, times)) {
        const auto grad_c0 = gradient(c0);
        double sup = 0.0;
        for (std::size_t i = 0; i < c0.values.size(); ++i) {
            double s = 0.0;
            for (const auto& comp : grad_c0) s += comp.values[i] * comp.values[i];
            sup = std::max(sup, s);
        }
        CHECK(rep.lhs <= std::sqrt(sup) * (1.0 + 1e-12));
        CHECK(rep.ratio <= 1.0 + 1e-6);
    }

    // Gaussian forcing battery
    const ScalarField forcing = gaussian_blob(g, nullptr, 1.0, 1.0);
    for (const auto& rep : verify_estimate_damped(ScalarField(g), forcing, 4.0, times))
        CHECK(rep.ratio <= 1.0 + 1e-6);

    // single-mode forcing: the measured sup matches the closed form
    const double k = 2.0 * M_PI * 2.0 / g.box_length;
    const ScalarField mode =
        make_field(g, [&](const double* x) { return std::sin(k * x[0]); });
    const auto reports = verify_estimate_damped(ScalarField(g), mode, 4.0, {0.5});
    const double lam = 1.0 + k * k;
    const double want = k * (1.0 - std::exp(-lam * 0.5)) / lam;
    CHECK(std::abs(reports[0].lhs - want) < 1e-10 * want);
    CHECK(reports[0].ratio <= 1.0 + 1e-6);

    CHECK_THROWS(verify_estimate_damped(c0, zero, 2.5, times));  // q <= n
}

TEST_CASE("battery is deterministic and obeys the estimates") {
    const GridSpec g(3, 32, 20.0);
    const auto a = estimate_battery(g, 12, 7);
    const auto b = estimate_battery(g, 12, 7);
    REQUIRE(a.size() == 12);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].ratio == b[i].ratio);
        CHECK(a[i].lhs == b[i].lhs);
    }
}
