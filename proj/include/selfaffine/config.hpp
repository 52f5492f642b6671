#ifndef SELFAFFINE_CONFIG_HPP
#define SELFAFFINE_CONFIG_HPP

#include "selfaffine/ifs.hpp"

#include "json.hpp"

#include <string>

namespace selfaffine {

// A parsed run description: the system, the task to run, and its parameters.
// Tasks: dq, tau, spectrum, lyapunov, closed-form, regimes, sample,
// empirical-tau, verify, covering.
struct RunConfig {
    int dimension = 0;
    bool has_spec = false;
    IFSSpec spec;
    std::string task;
    nlohmann::json params = nlohmann::json::object();
    std::string out_dir = ".";
};

// Parses and validates the JSON config. Spec invariants are enforced here:
// probability sums, contractivity (naming the offending map and its top
// singular value), translation shapes.
RunConfig parse_config(const std::string& text);

RunConfig load_config(const std::string& path);

// Canonical emission; parse(emit(parse(text))) reproduces the RunConfig.
std::string emit_config(const RunConfig& config);

// "--override key=value" for scalar parameters ("task=..." retargets the run).
void apply_override(RunConfig& config, const std::string& key_value);

} // namespace selfaffine

#endif
