// Command-line front end: constants, classify, simulate, verify-semigroup, sweep.
//
// Exit codes: 0 success (classify: subcritical), 2 parameter/config/i-o error,
// 3 supercritical_norm, 4 indeterminate, 5 numerical blow-up flag,
// 6 semigroup battery failures.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ks/config.hpp"
#include "ks/criterion.hpp"
#include "ks/driver.hpp"
#include "ks/format.hpp"
#include "ks/semigroup.hpp"

namespace {

using namespace ks;

int cmd_constants(int n, double m, double mass, bool json) {
    ModelParams params{n, m, mass};
    const ConstantsTable t = thresholds(params);
    if (json) {
        std::ostringstream os;
        os << "{\"S_n\":" << fmt_double(t.sobolev_S_n)
           << ",\"C_n\":" << fmt_double(t.hls_C_n)
           << ",\"m_c\":" << fmt_double(t.m_critical)
           << ",\"m_star\":" << fmt_double(t.m_fujita)
           << ",\"s_star\":" << fmt_double(t.s_star)
           << ",\"F_star\":" << fmt_double(t.F_star)
           << ",\"threshold_norm\":" << fmt_double(t.threshold_norm) << "}";
        std::cout << os.str() << "\n";
    } else {
        std::printf("n              = %d\n", n);
        std::printf("m              = %s\n", fmt_double(m).c_str());
        std::printf("mass           = %s\n", fmt_double(mass).c_str());
        std::printf("S_n            = %.12g\n", t.sobolev_S_n);
        std::printf("C_n            = %.12g\n", t.hls_C_n);
        std::printf("m_c            = %.12g\n", t.m_critical);
        std::printf("m_star         = %.12g\n", t.m_fujita);
        std::printf("s_star         = %.12g\n", t.s_star);
        std::printf("F_star         = %.12g\n", t.F_star);
        std::printf("threshold_norm = %.12g\n", t.threshold_norm);
    }
    return 0;
}

int cmd_classify(const std::string& init_file, const std::string& preset,
                 int n, int grid_n, double box, double m, double mass,
                 double sigma, double scale, double norm_fraction) {
    ModelParams params{n, m, mass};
    GridSpec grid(n, grid_n, box);
    ScalarField rho0(grid), c0(grid);
    if (!init_file.empty()) {
        rho0 = read_ksf(init_file);
        if (rho0.grid.dim != n)
            throw std::runtime_error("classify: field dimension differs from --n");
        grid = rho0.grid;
        c0 = resolvent(rho0);
    } else {
        InitSpec init;
        if (preset == "zero") {
            init.kind = InitSpec::Kind::zero;
        } else if (preset == "gaussian") {
            init.kind = InitSpec::Kind::gaussian_blob;
            init.sigma = sigma;
            init.mass = mass;
            init.scale = scale;
            init.norm_fraction = norm_fraction;
        } else {
            throw std::runtime_error("classify: unknown preset: " + preset);
        }
        init.c0 = InitSpec::C0::resolvent;
        auto pair = initial_data(grid, init, params);
        rho0 = std::move(pair.first);
        c0 = std::move(pair.second);
    }
    const CriterionVerdict v = classify(rho0, c0, params);
    std::cout << verdict_json(v) << "\n";
    switch (v.verdict) {
        case Verdict::subcritical: return 0;
        case Verdict::supercritical_norm: return 3;
        default: return 4;
    }
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir) {
    std::ifstream is(config_path);
    if (!is) throw std::runtime_error("simulate: cannot open " + config_path);
    std::ostringstream buf;
    buf << is.rdbuf();
    const std::string text = buf.str();
    const RunConfig rc = parse_run_config(text);
    const SimulateResult result = simulate_to_dir(rc, text, out_dir);
    if (result.trajectory.edge_warning)
        std::cerr << "warning: more than 1e-6 of the mass sits within 10% of the box edge\n";
    std::cout << out_dir << "/diagnostics.csv (" << result.rows.size() << " rows), outcome "
              << result.manifest.outcome << "\n";
    return result.trajectory.outcome == RunOutcome::completed ? 0 : 5;
}

int cmd_verify_semigroup(int n, int grid_n, double box, int battery,
                         std::uint64_t seed, const std::string& out_csv) {
    GridSpec grid(n, grid_n, box);
    const auto reports = estimate_battery(grid, battery, seed);
    std::ostringstream os;
    os << "p,q,t,which,lhs,rhs,ratio\n";
    bool all_ok = true;
    std::ostringstream failures;
    for (const auto& r : reports) {
        os << fmt_double(r.p) << ',' << fmt_double(r.q) << ',' << fmt_double(r.t) << ','
           << (r.gradient ? "gradient" : "value") << ',' << fmt_double(r.lhs) << ','
           << fmt_double(r.rhs) << ',' << fmt_double(r.ratio) << '\n';
        if (!(r.ratio <= 1.0 + 1e-6)) {
            all_ok = false;
            failures << "  (p=" << r.p << ", q=" << r.q << ", t=" << r.t << ") ratio "
                     << r.ratio << "\n";
        }
    }
    if (out_csv.empty()) {
        std::cout << os.str();
    } else {
        std::ofstream ofs(out_csv, std::ios::binary);
        ofs << os.str();
        std::cout << out_csv << " (" << reports.size() << " reports)\n";
    }
    if (!all_ok) {
        std::cerr << "estimate failures:\n" << failures.str();
        return 6;
    }
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir, int jobs) {
    std::ifstream is(config_path);
    if (!is) throw std::runtime_error("sweep: cannot open " + config_path);
    std::ostringstream buf;
    buf << is.rdbuf();
    const SweepResult result = run_sweep(buf.str(), out_dir, jobs);
    std::cout << out_dir << "/aggregate.csv (" << result.entries.size() << " runs)\n";
    return result.any_error ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical laboratory for degenerate chemotaxis dynamics on the torus"};
    app.require_subcommand(1);

    int n = 3, grid_n = 48, battery = 50;
    double m = 1.25, mass = 1.0, box = 20.0;
    double sigma = 1.0, scale = 1.0, norm_fraction = 0.0;
    std::uint64_t seed = 12345;
    bool json = false;
    std::string init_file, preset = "gaussian", config_path, out_dir = "out", out_csv;

    auto* constants = app.add_subcommand("constants", "print closed-form constants");
    constants->add_option("--n", n);
    constants->add_option("--m", m);
    constants->add_option("--mass", mass);
    constants->add_flag("--json", json);

    auto* classify = app.add_subcommand("classify", "classify initial data");
    classify->add_option("--init", init_file, "KSF1 field file");
    classify->add_option("--preset", preset, "zero | gaussian");
    classify->add_option("--n", n);
    classify->add_option("--N", grid_n);
    classify->add_option("--L", box);
    classify->add_option("--m", m);
    classify->add_option("--mass", mass);
    classify->add_option("--sigma", sigma);
    classify->add_option("--scale", scale);
    classify->add_option("--norm-fraction", norm_fraction);

    auto* simulate = app.add_subcommand("simulate", "run one configured simulation");
    simulate->add_option("--config", config_path)->required();
    simulate->add_option("--out", out_dir);

    auto* verify = app.add_subcommand("verify-semigroup", "heat-semigroup estimate battery");
    verify->add_option("--n", n);
    verify->add_option("--grid", grid_n);
    verify->add_option("--L", box);
    verify->add_option("--battery", battery);
    verify->add_option("--seed", seed);
    verify->add_option("--out", out_csv);

    auto* sweep = app.add_subcommand("sweep", "cartesian parameter sweep");
    sweep->add_option("--config", config_path)->required();
    sweep->add_option("--out", out_dir);
    int jobs = 2;
    sweep->add_option("--jobs", jobs);

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(constants)) return cmd_constants(n, m, mass, json);
        if (app.got_subcommand(classify))
            return cmd_classify(init_file, preset, n, grid_n, box, m, mass, sigma,
                                scale, norm_fraction);
        if (app.got_subcommand(simulate)) return cmd_simulate(config_path, out_dir);
        if (app.got_subcommand(verify))
            return cmd_verify_semigroup(n, grid_n, box, battery, seed, out_csv);
        if (app.got_subcommand(sweep)) return cmd_sweep(config_path, out_dir, jobs);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    }
    return 2;
}
