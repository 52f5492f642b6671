#ifndef SELFAFFINE_RUN_HPP
#define SELFAFFINE_RUN_HPP

#include "selfaffine/config.hpp"

#include <string>
#include <vector>

namespace selfaffine {

// Exit codes shared with the CLI: 0 success, 2 validation error,
// 3 budget/convergence/check failure.
struct RunResult {
    int exit_code = 0;
    std::vector<std::string> outputs;  // files written
    std::vector<std::string> failures; // human-readable check failures
};

// Dispatches the configured task and writes <task>.csv plus <task>.meta under
// config.out_dir. Validation and budget problems surface as exceptions; check
// failures (verify, covering) surface as exit code 3 with messages.
RunResult run(const RunConfig& config);

} // namespace selfaffine

#endif
