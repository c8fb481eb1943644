#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ks/constants.hpp"
#include "ks/dynamics.hpp"
#include "ks/field.hpp"

namespace ks {

/// Flat `key = value` text with `#` comments and dotted keys. Canonical form
/// (comments/whitespace stripped, keys sorted) feeds the config hash, so two
/// configs differing only in layout hash identically.
std::map<std::string, std::string> parse_kv(const std::string& text);
std::string canonicalize_kv(const std::string& text);
std::uint64_t fnv1a64(const std::string& bytes);
std::string config_hash(const std::string& text);  // 16 hex digits

struct RunConfig {
    GridSpec grid;
    ModelParams params;
    SolverConfig solver;
    InitSpec init;
};

/// Builds a RunConfig from config text. Unknown keys are rejected.
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);

struct RunManifest {
    std::string config_hash;
    std::string started_at;   // UTC, informational only
    std::string finished_at;
    std::string outcome;      // completed | numerical_blowup_flag | error
    std::vector<std::string> outputs;
};

std::string manifest_json(const RunManifest& m);
std::string utc_timestamp();

}  // namespace ks
