#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cbf/config.hpp"

namespace cbf {

struct RunCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct RunResult {
    int exit_code = 0; ///< 0 = checks passed, 2 = a check failed, 1 = execution error
    std::vector<std::string> files;
    std::vector<RunCheck> checks;
};

/// Executes the configured experiment: writes CSV artifacts and a manifest
/// into the output directory, runs the experiment's embedded checks, and
/// reports one line per check to `log` (unless quiet).
RunResult run_experiment(const ExperimentConfig& config, int threads, bool quiet,
                         std::ostream& log);

} // namespace cbf
