#pragma once

#include <optional>
#include <string>

namespace thermorel {

struct CliOptions {
    std::string config_path;
    std::string out_dir;  ///< overrides output.directory when non-empty
    std::optional<uint64_t> seed;
    std::optional<double> t_max;
    std::optional<int> replications;
    int threads = 0;   ///< 0: THERMOREL_THREADS env or hardware default
    int n_shapes = 20; ///< diagnose suite size
    bool resume = false;
};

/// Exit codes: 0 success, 2 config/validation error, 3 numerical failure.
int cmd_solve(const CliOptions& opts);
int cmd_sample(const CliOptions& opts);
int cmd_optimize(const CliOptions& opts);
int cmd_diagnose(const CliOptions& opts);
int cmd_mesh_export(const CliOptions& opts);

int resolve_thread_count(int requested);

}  // namespace thermorel
