#include "ks/criterion.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "ks/format.hpp"
#include "ks/parallel.hpp"

namespace ks {

namespace {

struct KahanSum {
    double s = 0.0, c = 0.0;
    void add(double x) {
        const double y = x - c;
        const double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    double value() const { return s; }
};

double grad_sq_integral(const ScalarField& f) {
    KahanSum acc;
    for (const auto& comp : gradient(f))
        for (double v : comp.values) acc.add(v * v);
    return acc.value() * f.grid.cell_volume();
}

}  // namespace

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::subcritical: return "subcritical";
        case Verdict::supercritical_norm: return "supercritical_norm";
        default: return "indeterminate";
    }
}

double free_energy(const ScalarField& rho, const ScalarField& c,
                   const ModelParams& params) {
    params.validate_basic();
    if (params.m == 1.0) throw std::domain_error("free_energy: m must differ from 1");
    if (!(rho.grid == c.grid)) throw std::invalid_argument("free_energy: grid mismatch");
    const double m = params.m;
    KahanSum acc;
    for (std::size_t i = 0; i < rho.values.size(); ++i) {
        const double r = rho.values[i], cc = c.values[i];
        acc.add(std::pow(r, m) / (m - 1.0) - r * cc + 0.5 * cc * cc);
    }
    return acc.value() * rho.grid.cell_volume() + 0.5 * grad_sq_integral(c);
}

EnergyReport free_energy_regularized(const ScalarField& rho, const ScalarField& c,
                                     const ModelParams& params, double epsilon,
                                     const Mollifier* mollifier,
                                     const ScalarField* c_t) {
    params.validate_basic();
    if (params.m == 1.0)
        throw std::domain_error("free_energy_regularized: m must differ from 1");
    if (!(rho.grid == c.grid))
        throw std::invalid_argument("free_energy_regularized: grid mismatch");
    if (!(epsilon >= 0.0))
        throw std::invalid_argument("free_energy_regularized: epsilon >= 0");
    const double m = params.m;
    const int n = params.dim;
    const double vol = rho.grid.cell_volume();

    const ScalarField rho_j = mollifier ? convolve(rho, *mollifier) : rho;
    const double eps_m = std::pow(epsilon, m);
    KahanSum bulk, cross, csq;
    for (std::size_t i = 0; i < rho.values.size(); ++i) {
        bulk.add(std::pow(rho.values[i] + epsilon, m) - eps_m);
        cross.add(rho_j.values[i] * c.values[i]);
        csq.add(c.values[i] * c.values[i]);
    }
    const double grad_c_sq = grad_sq_integral(c);

    EnergyReport rep;
    rep.cross_term = cross.value() * vol;
    rep.F_eps = bulk.value() * vol / (m - 1.0) - rep.cross_term +
                0.5 * grad_c_sq + 0.5 * csq.value() * vol;
    rep.F = free_energy(rho, c, params);
    const double sn = sobolev_constant(n);
    const double p_crit = 2.0 * n / (n + 2.0);
    const double norm_crit = lp_norm(rho, p_crit);
    rep.F1 = std::pow(lp_norm(rho, m), m) / (m - 1.0) -
             norm_crit * norm_crit / (2.0 * sn);
    const double norm_up = lp_norm(c, 2.0 * n / (n - 2.0));
    rep.F2 = 0.5 * grad_c_sq - 0.5 * sn * norm_up * norm_up;
    rep.dissipation =
        c_t ? dissipation(rho, c, *c_t, params, epsilon, mollifier) : 0.0;
    return rep;
}

double dissipation(const ScalarField& rho, const ScalarField& c,
                   const ScalarField& c_t, const ModelParams& params,
                   double epsilon, const Mollifier* mollifier) {
    params.validate_basic();
    if (params.m == 1.0) throw std::domain_error("dissipation: m must differ from 1");
    const double m = params.m;
    const ScalarField c_j = mollifier ? convolve(c, *mollifier) : c;
    ScalarField potential(rho.grid);
    parallel_for(0, rho.values.size(), [&](std::size_t i) {
        potential.values[i] =
            m / (m - 1.0) * std::pow(rho.values[i] + epsilon, m - 1.0) -
            c_j.values[i];
    });
    const auto grad_mu = gradient(potential);
    KahanSum acc;
    for (std::size_t i = 0; i < rho.values.size(); ++i) {
        double g2 = 0.0;
        for (const auto& comp : grad_mu) g2 += comp.values[i] * comp.values[i];
        const double ct = c_t.values[i];
        acc.add((rho.values[i] + epsilon) * g2 + ct * ct);
    }
    return acc.value() * rho.grid.cell_volume();
}

CriterionVerdict classify(const ScalarField& rho0, const ScalarField& c0,
                          const ModelParams& params) {
    const ConstantsTable table = thresholds(params);
    CriterionVerdict v;
    v.norm_crit = lp_norm(rho0, 2.0 * params.dim / (params.dim + 2.0));
    v.threshold_norm = table.threshold_norm;
    v.F0 = free_energy(rho0, c0, params);
    v.F_star = table.F_star;
    if (v.F0 < v.F_star && v.norm_crit < v.threshold_norm)
        v.verdict = Verdict::subcritical;
    else if (v.F0 < v.F_star && v.norm_crit > v.threshold_norm)
        v.verdict = Verdict::supercritical_norm;
    else
        v.verdict = Verdict::indeterminate;
    return v;
}

std::vector<DiagnosticsRow> track(const Trajectory& traj, const ModelParams& params,
                                  double epsilon, const Mollifier& mollifier,
                                  int k_max) {
    if (traj.snapshots.empty()) throw std::invalid_argument("track: empty trajectory");
    std::vector<DiagnosticsRow> rows;
    rows.reserve(traj.snapshots.size());
    for (const auto& snap : traj.snapshots) {
        const ScalarField& rho = snap.state.rho;
        DiagnosticsRow row;
        row.t = snap.state.t;
        row.mass = mass(rho);
        const ScalarField* ct = snap.warmup ? nullptr : &snap.c_t;
        const EnergyReport rep = free_energy_regularized(rho, snap.state.c, params,
                                                         epsilon, &mollifier, ct);
        row.F = rep.F;
        row.F_eps = rep.F_eps;
        row.F1 = rep.F1;
        row.F2 = rep.F2;
        row.dissipation = rep.dissipation;
        row.norm_crit = lp_norm(rho, 2.0 * params.dim / (params.dim + 2.0));
        row.norm_m = lp_norm(rho, params.m);
        row.norm_inf = lp_norm(rho, std::numeric_limits<double>::infinity());
        for (int k = 1; k <= k_max; ++k)
            row.moser.push_back(
                lp_norm(rho, static_cast<double>(moser_exponent(k, params.dim))));
        row.clipped_mass = snap.clipped_since_last;
        row.dt = snap.dt_last;
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string diagnostics_csv(const std::vector<DiagnosticsRow>& rows, int k_max) {
    std::ostringstream os;
    os << "t,mass,F,F_eps,F1,F2,dissipation,norm_crit,norm_m,norm_inf";
    for (int k = 1; k <= k_max; ++k) os << ",moser_p" << k;
    os << ",clipped_mass,dt\n";
    for (const auto& r : rows) {
        os << fmt_double(r.t) << ',' << fmt_double(r.mass) << ',' << fmt_double(r.F)
           << ',' << fmt_double(r.F_eps) << ',' << fmt_double(r.F1) << ','
           << fmt_double(r.F2) << ',' << fmt_double(r.dissipation) << ','
           << fmt_double(r.norm_crit) << ',' << fmt_double(r.norm_m) << ','
           << fmt_double(r.norm_inf);
        for (int k = 0; k < k_max; ++k)
            os << ',' << fmt_double(k < static_cast<int>(r.moser.size()) ? r.moser[k] : 0.0);
        os << ',' << fmt_double(r.clipped_mass) << ',' << fmt_double(r.dt) << '\n';
    }
    return os.str();
}

std::string verdict_json(const CriterionVerdict& v) {
    std::ostringstream os;
    os << "{\"norm_2n_over_np2\":" << fmt_double(v.norm_crit)
       << ",\"threshold_norm\":" << fmt_double(v.threshold_norm)
       << ",\"F0\":" << fmt_double(v.F0) << ",\"F_star\":" << fmt_double(v.F_star)
       << ",\"verdict\":\"" << verdict_name(v.verdict) << "\"}";
    return os.str();
}

}  // namespace ks
