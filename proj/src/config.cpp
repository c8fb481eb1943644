#include "ks/config.hpp"

#include <cctype>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ks {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        throw std::runtime_error("config: key '" + key + "' is not a number: " + v);
    }
}

long to_long(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long x = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        throw std::runtime_error("config: key '" + key + "' is not an integer: " + v);
    }
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::runtime_error("config: key '" + key + "' is not a boolean: " + v);
}

}  // namespace

std::map<std::string, std::string> parse_kv(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config: line " + std::to_string(lineno) +
                                     " has no '='");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw std::runtime_error("config: empty key on line " +
                                     std::to_string(lineno));
        kv[key] = value;
    }
    return kv;
}

std::string canonicalize_kv(const std::string& text) {
    std::string out;
    for (const auto& [k, v] : parse_kv(text)) {
        out += k;
        out += '=';
        out += v;
        out += '\n';
    }
    return out;
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string config_hash(const std::string& text) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(canonicalize_kv(text))));
    return buf;
}

RunConfig parse_run_config(const std::string& text) {
    auto kv = parse_kv(text);
    RunConfig rc;

    int dim = 3, n = 64;
    double box = 20.0;
    auto take = [&](const char* key) -> std::string {
        auto it = kv.find(key);
        if (it == kv.end()) return {};
        std::string v = it->second;
        kv.erase(it);
        return v;
    };

    if (auto v = take("n"); !v.empty()) dim = static_cast<int>(to_long("n", v));
    if (auto v = take("N"); !v.empty()) n = static_cast<int>(to_long("N", v));
    if (auto v = take("L"); !v.empty()) box = to_double("L", v);
    rc.grid = GridSpec(dim, n, box);

    rc.params.dim = dim;
    if (auto v = take("m"); !v.empty()) rc.params.m = to_double("m", v);
    if (auto v = take("mass"); !v.empty()) rc.params.mass = to_double("mass", v);

    if (auto v = take("epsilon"); !v.empty()) rc.solver.epsilon = to_double("epsilon", v);
    if (auto v = take("dt_init"); !v.empty()) rc.solver.dt_init = to_double("dt_init", v);
    if (auto v = take("t_end"); !v.empty()) rc.solver.t_end = to_double("t_end", v);
    if (auto v = take("cfl_safety"); !v.empty())
        rc.solver.cfl_safety = to_double("cfl_safety", v);
    if (auto v = take("snapshot_every"); !v.empty())
        rc.solver.snapshot_every = static_cast<int>(to_long("snapshot_every", v));
    if (auto v = take("seed"); !v.empty())
        rc.solver.seed = static_cast<std::uint64_t>(to_long("seed", v));
    if (auto v = take("mollify"); !v.empty()) rc.solver.mollify = to_bool("mollify", v);
    if (auto v = take("mollifier_width"); !v.empty())
        rc.solver.mollifier.width = to_double("mollifier_width", v);
    if (auto v = take("mollifier_kind"); !v.empty()) {
        if (v == "gaussian") rc.solver.mollifier.kind = Mollifier::Kind::gaussian;
        else if (v == "bump") rc.solver.mollifier.kind = Mollifier::Kind::bump;
        else throw std::runtime_error("config: unknown mollifier_kind: " + v);
    }
    if (auto v = take("scheme"); !v.empty()) {
        if (v == "explicit_rho_implicit_c")
            rc.solver.scheme = Scheme::explicit_rho_implicit_c;
        else if (v == "fully_explicit")
            rc.solver.scheme = Scheme::fully_explicit;
        else
            throw std::runtime_error("config: unknown scheme: " + v);
    }

    rc.init.mass = rc.params.mass;
    if (auto v = take("init.kind"); !v.empty()) {
        if (v == "gaussian_blob") rc.init.kind = InitSpec::Kind::gaussian_blob;
        else if (v == "two_blobs") rc.init.kind = InitSpec::Kind::two_blobs;
        else if (v == "file") rc.init.kind = InitSpec::Kind::file;
        else if (v == "zero") rc.init.kind = InitSpec::Kind::zero;
        else throw std::runtime_error("config: unknown init.kind: " + v);
    }
    if (auto v = take("init.sigma"); !v.empty()) rc.init.sigma = to_double("init.sigma", v);
    if (auto v = take("init.separation"); !v.empty())
        rc.init.separation = to_double("init.separation", v);
    if (auto v = take("init.mass"); !v.empty()) rc.init.mass = to_double("init.mass", v);
    if (auto v = take("init.scale"); !v.empty()) rc.init.scale = to_double("init.scale", v);
    if (auto v = take("init.norm_fraction"); !v.empty())
        rc.init.norm_fraction = to_double("init.norm_fraction", v);
    if (auto v = take("init.file"); !v.empty()) rc.init.file = v;
    if (auto v = take("init.c0"); !v.empty()) {
        if (v == "resolvent") rc.init.c0 = InitSpec::C0::resolvent;
        else if (v == "zero") rc.init.c0 = InitSpec::C0::zero;
        else throw std::runtime_error("config: unknown init.c0: " + v);
    }

    for (const auto& [k, v] : kv)
        if (k.rfind("sweep.", 0) != 0)
            throw std::runtime_error("config: unknown key: " + k);
    return rc;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("config: cannot open " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse_run_config(buf.str());
}

std::string manifest_json(const RunManifest& m) {
    std::ostringstream os;
    os << "{\"config_hash\":\"" << m.config_hash << "\",\"started_at\":\""
       << m.started_at << "\",\"finished_at\":\"" << m.finished_at
       << "\",\"outcome\":\"" << m.outcome << "\",\"outputs\":[";
    for (std::size_t i = 0; i < m.outputs.size(); ++i) {
        if (i) os << ',';
        os << '"' << m.outputs[i] << '"';
    }
    os << "]}";
    return os.str();
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace ks
