#include "ks/driver.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "ks/format.hpp"

namespace ks {

namespace {

namespace fs = std::filesystem;

void write_text(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << text;
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::istringstream is(s);
    std::string item;
    while (std::getline(is, item, ',')) {
        std::size_t pos = 0;
        out.push_back(std::stod(item, &pos));
    }
    if (out.empty()) throw std::runtime_error("sweep: empty value list");
    return out;
}

}  // namespace

SimulateResult simulate_to_dir(const RunConfig& rc, const std::string& config_text,
                               const std::string& out_dir, int k_max) {
    fs::create_directories(out_dir);
    SimulateResult result;
    result.manifest.config_hash = config_hash(config_text);
    result.manifest.started_at = utc_timestamp();

    auto [rho0, c0] = initial_data(rc.grid, rc.init, rc.params);
    result.trajectory = run(rc.solver, rc.params, rho0, c0);
    result.rows = track(result.trajectory, rc.params, rc.solver.epsilon,
                        rc.solver.mollifier, k_max);
    result.csv = diagnostics_csv(result.rows, k_max);

    for (const auto& snap : result.trajectory.snapshots) {
        const std::string tag = std::to_string(snap.state.step_count);
        const std::string rho_path = out_dir + "/rho_" + tag + ".ksf";
        const std::string c_path = out_dir + "/c_" + tag + ".ksf";
        write_ksf(rho_path, snap.state.rho);
        write_ksf(c_path, snap.state.c);
        result.manifest.outputs.push_back("rho_" + tag + ".ksf");
        result.manifest.outputs.push_back("c_" + tag + ".ksf");
    }
    write_text(out_dir + "/diagnostics.csv", result.csv);
    result.manifest.outputs.push_back("diagnostics.csv");
    result.manifest.outcome =
        result.trajectory.outcome == RunOutcome::completed ? "completed"
                                                           : "numerical_blowup_flag";
    result.manifest.finished_at = utc_timestamp();
    write_text(out_dir + "/manifest.json", manifest_json(result.manifest));
    return result;
}

SweepResult run_sweep(const std::string& sweep_text, const std::string& out_dir,
                      int jobs) {
    if (jobs < 1) jobs = 1;
    auto kv = parse_kv(sweep_text);
    auto list_of = [&](const char* key, double fallback) {
        auto it = kv.find(key);
        if (it == kv.end()) return std::vector<double>{fallback};
        auto values = parse_list(it->second);
        kv.erase(it);
        return values;
    };
    const RunConfig base = parse_run_config(sweep_text);
    const auto ms = list_of("sweep.m", base.params.m);
    const auto masses = list_of("sweep.mass", base.params.mass);
    const auto scales = list_of("sweep.scale", base.init.scale);

    // Base kv without sweep.* drives each run's canonical config text.
    std::map<std::string, std::string> base_kv = parse_kv(sweep_text);
    for (auto it = base_kv.begin(); it != base_kv.end();)
        it = it->first.rfind("sweep.", 0) == 0 ? base_kv.erase(it) : std::next(it);

    struct Job {
        double m, mass, scale;
        std::string dir;
        std::string config_text;
    };
    std::vector<Job> work;
    int idx = 0;
    for (double m : ms)
        for (double mass : masses)
            for (double scale : scales) {
                char tag[16];
                std::snprintf(tag, sizeof tag, "run_%03d", idx++);
                auto run_kv = base_kv;
                run_kv["m"] = fmt_double(m);
                run_kv["mass"] = fmt_double(mass);
                run_kv["init.scale"] = fmt_double(scale);
                std::string text;
                for (const auto& [k, v] : run_kv) text += k + " = " + v + "\n";
                work.push_back({m, mass, scale, out_dir + "/" + std::string(tag), text});
            }

    fs::create_directories(out_dir);
    SweepResult result;
    result.entries.resize(work.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> any_error{false};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= work.size()) return;
            const Job& job = work[i];
            SweepEntry entry;
            entry.m = job.m;
            entry.mass = job.mass;
            entry.scale = job.scale;
            entry.dir = job.dir;
            try {
                const RunConfig rc = parse_run_config(job.config_text);
                fs::create_directories(job.dir);
                write_text(job.dir + "/config.txt", job.config_text);
                SimulateResult sim = simulate_to_dir(rc, job.config_text, job.dir);
                auto [rho0, c0] = initial_data(rc.grid, rc.init, rc.params);
                entry.verdict = verdict_name(classify(rho0, c0, rc.params).verdict);
                for (const auto& row : sim.rows) {
                    entry.max_norm_crit = std::max(entry.max_norm_crit, row.norm_crit);
                    entry.max_norm_inf = std::max(entry.max_norm_inf, row.norm_inf);
                }
                entry.final_mass = sim.rows.back().mass;
                entry.outcome = sim.manifest.outcome;
            } catch (const std::exception& ex) {
                entry.outcome = "error";
                entry.verdict = "error";
                any_error = true;
                write_text(job.dir + "/error.txt", ex.what());
            }
            result.entries[i] = std::move(entry);
        }
    };
    std::vector<std::thread> pool;
    const int width = std::min<int>(jobs, static_cast<int>(work.size()));
    for (int w = 0; w < width; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    std::sort(result.entries.begin(), result.entries.end(),
              [](const SweepEntry& a, const SweepEntry& b) {
                  return std::tie(a.m, a.mass, a.scale) < std::tie(b.m, b.mass, b.scale);
              });
    std::ostringstream os;
    os << "m,mass,scale,verdict,max_norm_crit,max_norm_inf,final_mass,outcome\n";
    for (const auto& e : result.entries) {
        os << fmt_double(e.m) << ',' << fmt_double(e.mass) << ',' << fmt_double(e.scale)
           << ',' << e.verdict << ',' << fmt_double(e.max_norm_crit) << ','
           << fmt_double(e.max_norm_inf) << ',' << fmt_double(e.final_mass) << ','
           << e.outcome << '\n';
    }
    result.aggregate_csv = os.str();
    write_text(out_dir + "/aggregate.csv", result.aggregate_csv);
    result.any_error = any_error.load();
    return result;
}

}  // namespace ks
