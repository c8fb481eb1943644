#include "ks/semigroup.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "ks/constants.hpp"
#include "ks/special.hpp"

namespace ks {

namespace {

double inv(double p) { return std::isinf(p) ? 0.0 : 1.0 / p; }

/// Pointwise Euclidean magnitude of a gradient.
ScalarField magnitude(const std::vector<ScalarField>& v) {
    ScalarField out(v[0].grid);
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        double s = 0.0;
        for (const auto& comp : v) s += comp.values[i] * comp.values[i];
        out.values[i] = std::sqrt(s);
    }
    return out;
}

struct Lcg {
    std::uint64_t state;
    explicit Lcg(std::uint64_t seed) : state(seed * 2654435769u + 1) {}
    double uniform() {  // in [0, 1)
        state = state * 6364136223846793005ull + 1442695040888963407ull;
        return static_cast<double>(state >> 11) * 0x1p-53;
    }
};

}  // namespace

ScalarField heat_evolve(const ScalarField& f, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("heat_evolve: requires t >= 0");
    if (t == 0.0) return f;
    return apply_k2_multiplier(f, [t](double k2) { return std::exp(-k2 * t); });
}

ScalarField resolvent(const ScalarField& rho) {
    return apply_k2_multiplier(rho, [](double k2) { return 1.0 / (1.0 + k2); });
}

ScalarField mild_solution_c(const ScalarField& c0,
                            const std::vector<ScalarField>& rho_samples,
                            double sample_dt, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("mild_solution_c: requires t >= 0");
    if (t == 0.0) return c0;
    if (!(sample_dt > 0.0))
        throw std::invalid_argument("mild_solution_c: sample_dt must be positive");
    const std::size_t count = rho_samples.size();
    if (count < 2 ||
        std::abs((static_cast<double>(count - 1)) * sample_dt - t) > 1e-9 * t)
        throw std::invalid_argument(
            "mild_solution_c: sample lattice does not cover [0, t] uniformly");

    const GridSpec& g = c0.grid;
    const auto& k2 = k2_table(g);
    auto acc = spectrum(c0);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] *= std::exp(-(1.0 + k2[i]) * t);
    for (std::size_t j = 0; j < count; ++j) {
        if (!(rho_samples[j].grid == g))
            throw std::invalid_argument("mild_solution_c: grid mismatch in samples");
        const double s = static_cast<double>(j) * sample_dt;
        const double w = (j == 0 || j + 1 == count) ? 0.5 : 1.0;
        auto spec = spectrum(rho_samples[j]);
        for (std::size_t i = 0; i < spec.size(); ++i)
            acc[i] += w * sample_dt * std::exp(-(1.0 + k2[i]) * (t - s)) * spec[i];
    }
    return field_from_spectrum(g, std::move(acc));
}

SemigroupEstimateReport verify_estimate_heat(const ScalarField& f, double p,
                                             double q, double t, bool gradient) {
    if (!(t > 0.0)) throw std::invalid_argument("verify_estimate_heat: t > 0");
    const int n = f.grid.dim;
    const SemigroupConstants sc = semigroup_constants(p, q, n);

    SemigroupEstimateReport rep;
    rep.p = p;
    rep.q = q;
    rep.t = t;
    rep.gradient = gradient;

    const ScalarField evolved = heat_evolve(f, t);
    const double tpow = gradient ? -0.5 - 0.5 * n * (inv(q) - inv(p))
                                 : -0.5 * n * (inv(q) - inv(p));
    rep.lhs = gradient ? lp_norm(magnitude(ks::gradient(evolved)), p)
                       : lp_norm(evolved, p);
    rep.rhs = (gradient ? sc.B : sc.A) * std::pow(t, tpow) * lp_norm(f, q);
    rep.ratio = rep.lhs / rep.rhs;
    return rep;
}

std::vector<SemigroupEstimateReport> verify_estimate_damped(
    const ScalarField& c0, const ScalarField& forcing, double q,
    const std::vector<double>& times) {
    const GridSpec& g = c0.grid;
    const int n = g.dim;
    if (!(q > n)) throw std::invalid_argument("verify_estimate_damped: requires q > n");
    if (!(forcing.grid == g))
        throw std::invalid_argument("verify_estimate_damped: grid mismatch");

    const SemigroupConstants sc =
        semigroup_constants(std::numeric_limits<double>::infinity(), q, n);
    const double grad_c0_inf = max_abs(magnitude(gradient(c0)));
    const double bound =
        grad_c0_inf + sc.B * gamma_fn(0.5 - 0.5 * n / q) * lp_norm(forcing, q);

    const auto& k2 = k2_table(g);
    const auto c0_hat = spectrum(c0);
    const auto f_hat = spectrum(forcing);

    std::vector<SemigroupEstimateReport> out;
    out.reserve(times.size());
    for (double t : times) {
        if (!(t >= 0.0))
            throw std::invalid_argument("verify_estimate_damped: negative time");
        // constant forcing: per-mode closed form of the Duhamel integral
        std::vector<std::complex<double>> spec(c0_hat.size());
        for (std::size_t i = 0; i < spec.size(); ++i) {
            const double lam = 1.0 + k2[i];
            spec[i] = std::exp(-lam * t) * c0_hat[i] +
                      (1.0 - std::exp(-lam * t)) / lam * f_hat[i];
        }
        const ScalarField c = field_from_spectrum(g, std::move(spec));
        SemigroupEstimateReport rep;
        rep.p = std::numeric_limits<double>::infinity();
        rep.q = q;
        rep.t = t;
        rep.gradient = true;
        rep.lhs = max_abs(magnitude(gradient(c)));
        rep.rhs = bound;
        rep.ratio = rep.lhs / rep.rhs;
        out.push_back(rep);
    }
    return out;
}

ScalarField gaussian_blob(const GridSpec& g, const double* center, double sigma,
                          double total) {
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_blob: sigma > 0");
    if (!(total > 0.0)) throw std::invalid_argument("gaussian_blob: mass > 0");
    const double L = g.box_length;
    double c[kMaxDim];
    for (int a = 0; a < g.dim; ++a) c[a] = center ? center[a] : 0.5 * L;
    ScalarField blob = make_field(g, [&](const double* x) {
        double d2 = 0.0;
        for (int a = 0; a < g.dim; ++a) {
            double d = std::abs(x[a] - c[a]);
            d = std::min(d, L - d);
            d2 += d * d;
        }
        return std::exp(-d2 / (2.0 * sigma * sigma));
    });
    const double got = mass(blob);
    for (double& v : blob.values) v *= total / got;
    return blob;
}

std::vector<SemigroupEstimateReport> estimate_battery(const GridSpec& g,
                                                      int count,
                                                      std::uint64_t seed) {
    const double infp = std::numeric_limits<double>::infinity();
    // all (p, q) with q <= p over {2, 4, inf}
    const double pairs[6][2] = {{2, 2}, {4, 2}, {4, 4}, {infp, 2}, {infp, 4}, {infp, infp}};
    const double times[3] = {0.1, 0.5, 2.0};

    Lcg rng(seed);
    std::vector<SemigroupEstimateReport> out;
    out.reserve(count > 0 ? count : 0);
    for (int i = 0; i < count; ++i) {
        const double sigma = 1.0 + 0.5 * rng.uniform();
        double center[kMaxDim];
        for (int a = 0; a < g.dim; ++a)
            center[a] = 0.5 * g.box_length + 0.8 * (rng.uniform() - 0.5);
        const ScalarField f = gaussian_blob(g, center, sigma, 1.0);
        if (edge_mass_fraction(f) > 1e-6)
            throw std::runtime_error("estimate_battery: blob leaks into the edge band");
        const auto& pq = pairs[i % 6];
        const double t = times[(i / 6) % 3];
        const bool gradient = (i / 18) % 2 == 1;
        out.push_back(verify_estimate_heat(f, pq[0], pq[1], t, gradient));
    }
    return out;
}

}  // namespace ks
