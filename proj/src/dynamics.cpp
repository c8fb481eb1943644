#include "ks/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "ks/parallel.hpp"
#include "ks/semigroup.hpp"

namespace ks {

namespace {

using cplx = std::complex<double>;

const ConvolutionKernel& cached_kernel(const GridSpec& g, const Mollifier& m) {
    static std::mutex mu;
    static std::map<std::tuple<int, int, double, double, int>,
                    std::unique_ptr<ConvolutionKernel>>
        cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{g.dim, g.n_per_axis, g.box_length, m.width,
                        static_cast<int>(m.kind)}];
    if (!slot)
        slot = std::make_unique<ConvolutionKernel>(mollifier_kernel(g, m));
    return *slot;
}

double max_k2(const GridSpec& g) {
    const auto& k2 = k2_table(g);
    double m = 0.0;
    for (double v : k2) m = std::max(m, v);
    return m;
}

/// Drift velocity components grad(c * J) (or grad c), from the spectrum of c.
std::vector<ScalarField> drift_from_spectrum(const GridSpec& g,
                                             const std::vector<cplx>& c_hat,
                                             const cplx* j_hat) {
    std::vector<ScalarField> w;
    w.reserve(g.dim);
    const int n = g.n_per_axis;
    const GridIndexer ix(g);
    for (int a = 0; a < g.dim; ++a) {
        std::vector<cplx> spec(c_hat.size());
        const std::size_t stride = ix.stride[a];
        for (std::size_t i = 0; i < spec.size(); ++i) {
            const int j = static_cast<int>((i / stride) % static_cast<std::size_t>(n));
            const double k = deriv_wavenumber(j, n, g.box_length);
            cplx v = c_hat[i] * cplx(0.0, k);
            if (j_hat) v *= j_hat[i];
            spec[i] = v;
        }
        w.push_back(field_from_spectrum(g, std::move(spec)));
    }
    return w;
}

double max_component_abs(const std::vector<ScalarField>& w) {
    double m = 0.0;
    for (const auto& comp : w) m = std::max(m, max_abs(comp));
    return m;
}

double dt_from_caps(const GridSpec& g, const SolverConfig& cfg,
                    const ModelParams& params, double max_rho, double max_w) {
    const double dx = g.dx();
    const double inf = std::numeric_limits<double>::infinity();
    const double mob = params.m * std::pow(max_rho + cfg.epsilon, params.m - 1.0);
    const double diff_cap =
        mob > 0.0 ? dx * dx / (2.0 * g.dim * mob) : inf;
    const double adv_cap = dx / (max_w + 1e-30);
    double dt = cfg.cfl_safety * std::min(diff_cap, adv_cap);
    if (cfg.scheme == Scheme::fully_explicit) {
        // explicit spectral c-update is stable for dt < 2/(1 + |k|_max^2)
        dt = std::min(dt, cfg.cfl_safety * 2.0 / (1.0 + max_k2(g)));
    }
    return std::min(dt, cfg.dt_init);
}

}  // namespace

std::pair<ScalarField, ScalarField> initial_data(const GridSpec& g,
                                                 const InitSpec& init,
                                                 const ModelParams& params) {
    ScalarField rho0(g);
    switch (init.kind) {
        case InitSpec::Kind::zero:
            break;
        case InitSpec::Kind::gaussian_blob:
            rho0 = gaussian_blob(g, nullptr, init.sigma, init.mass);
            break;
        case InitSpec::Kind::two_blobs: {
            double c1[kMaxDim], c2[kMaxDim];
            for (int a = 0; a < g.dim; ++a) c1[a] = c2[a] = 0.5 * g.box_length;
            c1[0] -= 0.5 * init.separation;
            c2[0] += 0.5 * init.separation;
            rho0 = gaussian_blob(g, c1, init.sigma, 0.5 * init.mass) +
                   gaussian_blob(g, c2, init.sigma, 0.5 * init.mass);
            break;
        }
        case InitSpec::Kind::file: {
            rho0 = read_ksf(init.file);
            if (!(rho0.grid == g))
                throw std::runtime_error("initial_data: field file grid differs from run grid");
            break;
        }
    }
    if (init.scale != 1.0) rho0 = init.scale * rho0;
    if (init.norm_fraction > 0.0) {
        const double pc = 2.0 * params.dim / (params.dim + 2.0);
        const double cur = lp_norm(rho0, pc);
        if (!(cur > 0.0))
            throw std::runtime_error("initial_data: cannot scale a zero field to a norm target");
        rho0 = (init.norm_fraction * thresholds(params).threshold_norm / cur) * rho0;
    }
    ScalarField c0 = init.c0 == InitSpec::C0::resolvent ? resolvent(rho0)
                                                        : ScalarField(g);
    return {std::move(rho0), std::move(c0)};
}

double choose_dt(const SimState& state, const SolverConfig& cfg,
                 const ModelParams& params) {
    const GridSpec& g = state.rho.grid;
    double max_w = 0.0;
    if (cfg.chemotaxis) {
        const cplx* j_hat =
            cfg.mollify ? cached_kernel(g, cfg.mollifier).hat().data() : nullptr;
        max_w = max_component_abs(drift_from_spectrum(g, spectrum(state.c), j_hat));
    }
    return dt_from_caps(g, cfg, params, max_value(state.rho), max_w);
}

StepResult step(const SimState& state, const SolverConfig& cfg,
                const ModelParams& params, double dt_cap) {
    params.validate_basic();
    const GridSpec& g = state.rho.grid;
    if (!(state.c.grid == g)) throw std::invalid_argument("step: rho/c grid mismatch");
    const GridIndexer ix(g);
    const std::size_t total = g.size();
    const double dx = g.dx();
    const double eps = cfg.epsilon;
    const double m = params.m;
    const double pre_max = max_value(state.rho);
    const double pre_min = min_value(state.rho);
    if (!(pre_min >= -1e-12 * std::max(pre_max, 0.0))) {
        StepResult res;
        std::ostringstream os;
        os << "step: input density violates nonnegativity (min " << pre_min
           << ") at t=" << state.t;
        res.error = os.str();
        res.state = state;
        return res;
    }

    // Drift velocity w = grad(c * J) and the spectrum of c (reused below).
    auto c_hat = spectrum(state.c);
    const cplx* j_hat =
        cfg.mollify ? cached_kernel(g, cfg.mollifier).hat().data() : nullptr;
    std::vector<ScalarField> w;
    if (cfg.chemotaxis) w = drift_from_spectrum(g, c_hat, j_hat);
    const double max_w = cfg.chemotaxis ? max_component_abs(w) : 0.0;

    // dt_cap only trims the final step onto t_end; the underflow indicator
    // below watches the stability-driven value, not the trimmed one.
    const double dt_stab = dt_from_caps(g, cfg, params, pre_max, max_w);
    const double dt = std::min(dt_stab, dt_cap);

    // Degenerate diffusion, conservative stencil on u = (rho + eps)^m.
    std::vector<double> u(total);
    const double* rho = state.rho.values.data();
    parallel_for(0, total, [&](std::size_t i) { u[i] = std::pow(rho[i] + eps, m); });

    ScalarField rho_star(g);
    const double lam = dt / (dx * dx);
    if (cfg.freeze_rho) {
        rho_star = state.rho;
    } else {
        parallel_for(0, total, [&](std::size_t i) {
            double acc = 0.0;
            for (int a = 0; a < g.dim; ++a)
                acc += u[ix.up(i, a)] - 2.0 * u[i] + u[ix.down(i, a)];
            rho_star.values[i] = rho[i] + lam * acc;
        });
    }

    // Upwind advection with a per-cell outflow limiter; the limiter only
    // engages in near-vacuum cells where the eps part of the flux would
    // otherwise push the density negative.
    ScalarField rho_new = rho_star;
    if (cfg.chemotaxis && !cfg.freeze_rho) {
        std::vector<std::vector<double>> flux(g.dim, std::vector<double>(total));
        const double* rs = rho_star.values.data();
        for (int a = 0; a < g.dim; ++a) {
            const double* wa = w[a].values.data();
            auto& fa = flux[a];
            parallel_for(0, total, [&](std::size_t i) {
                const std::size_t iu = ix.up(i, a);
                const double wf = 0.5 * (wa[i] + wa[iu]);
                const double carried = (wf > 0.0 ? rs[i] : rs[iu]) + eps;
                fa[i] = wf * carried;
            });
        }
        std::vector<double> theta(total);
        const double r = dt / dx;
        parallel_for(0, total, [&](std::size_t i) {
            double outflow = 0.0;
            for (int a = 0; a < g.dim; ++a) {
                outflow += std::max(flux[a][i], 0.0);
                outflow += std::max(-flux[a][ix.down(i, a)], 0.0);
            }
            outflow *= r;
            theta[i] =
                outflow > 0.0 && outflow > rs[i] ? std::max(rs[i], 0.0) / outflow : 1.0;
        });
        parallel_for(0, total, [&](std::size_t i) {
            double div = 0.0;
            for (int a = 0; a < g.dim; ++a) {
                const double fo = flux[a][i];
                const std::size_t idn = ix.down(i, a);
                const double fi = flux[a][idn];
                div += fo * (fo > 0.0 ? theta[i] : theta[ix.up(i, a)]);
                div -= fi * (fi > 0.0 ? theta[idn] : theta[i]);
            }
            rho_new.values[i] -= r * div;
        });
    }

    StepResult res;
    res.dt = dt;

    // Clip round-off negativity; anything beyond the tolerance is a hard error.
    const double post_max = max_value(rho_new);
    const double clip_tol = 1e-12 * std::max(post_max, 0.0);
    double clipped = 0.0;
    for (std::size_t i = 0; i < total; ++i) {
        double& v = rho_new.values[i];
        if (v < 0.0) {
            if (-v > clip_tol) {
                std::ostringstream os;
                os << "step: negativity " << v << " beyond tolerance " << -clip_tol
                   << " at t=" << state.t;
                res.error = os.str();
                res.state = state;
                return res;
            }
            clipped += -v;
            v = 0.0;
        }
    }
    res.clipped_mass = clipped * g.cell_volume();

    if ((pre_max > 0.0 && post_max > 1e3 * pre_max) || dt_stab < 1e-12)
        res.blowup = true;

    // Chemical update: backward Euler (default) or fully explicit, spectral.
    auto src_hat = spectrum(rho_new);
    if (j_hat)
        for (std::size_t i = 0; i < src_hat.size(); ++i) src_hat[i] *= j_hat[i];
    const auto& k2 = k2_table(g);
    std::vector<cplx> c_new_hat(c_hat.size());
    if (cfg.scheme == Scheme::explicit_rho_implicit_c) {
        for (std::size_t i = 0; i < c_hat.size(); ++i)
            c_new_hat[i] =
                (c_hat[i] + dt * src_hat[i]) / (1.0 + dt + dt * k2[i]);
    } else {
        for (std::size_t i = 0; i < c_hat.size(); ++i)
            c_new_hat[i] =
                c_hat[i] + dt * (src_hat[i] - (1.0 + k2[i]) * c_hat[i]);
    }

    res.state.rho = std::move(rho_new);
    res.state.c = field_from_spectrum(g, std::move(c_new_hat));
    res.state.t = state.t + dt;
    res.state.step_count = state.step_count + 1;
    return res;
}

Trajectory run(const SolverConfig& cfg, const ModelParams& params,
               const ScalarField& rho0, const ScalarField& c0) {
    if (!(cfg.t_end >= 0.0)) throw std::invalid_argument("run: t_end must be >= 0");
    if (!(cfg.dt_init > 0.0)) throw std::invalid_argument("run: dt_init must be > 0");
    if (!(cfg.cfl_safety > 0.0 && cfg.cfl_safety <= 1.0))
        throw std::invalid_argument("run: cfl_safety must be in (0, 1]");
    const GridSpec& g = rho0.grid;
    const std::int64_t cadence = cfg.snapshot_every > 0
                                     ? cfg.snapshot_every
                                     : std::numeric_limits<std::int64_t>::max();

    Trajectory traj;
    SimState state{rho0, c0, 0.0, 0};

    Snapshot first;
    first.state = state;
    first.edge_fraction = edge_mass_fraction(rho0);
    traj.edge_warning = first.edge_fraction > 1e-6;
    traj.snapshots.push_back(std::move(first));

    double acc_clip = 0.0;
    while (state.t < cfg.t_end * (1.0 - 1e-14)) {
        const ScalarField c_prev = state.c;
        StepResult res = step(state, cfg, params, cfg.t_end - state.t);
        if (!res.error.empty()) throw std::runtime_error(res.error);
        acc_clip += res.clipped_mass;
        traj.total_clipped += res.clipped_mass;
        state = std::move(res.state);

        const bool finished = state.t >= cfg.t_end * (1.0 - 1e-14);
        if (state.step_count % cadence == 0 || finished || res.blowup) {
            Snapshot snap;
            snap.state = state;
            snap.dt_last = res.dt;
            snap.clipped_since_last = acc_clip;
            snap.c_t = (1.0 / res.dt) * (state.c - c_prev);
            snap.warmup = false;
            snap.edge_fraction = edge_mass_fraction(state.rho);
            traj.edge_warning = traj.edge_warning || snap.edge_fraction > 1e-6;
            traj.snapshots.push_back(std::move(snap));
            acc_clip = 0.0;
        }
        if (res.blowup) {
            traj.outcome = RunOutcome::numerical_blowup_flag;
            traj.fail_time = state.t;
            break;
        }
    }
    return traj;
}

}  // namespace ks
