#pragma once

#include <string>
#include <vector>

#include "gridflow/model.hpp"

namespace gridflow {

struct ExperimentConfig {
    std::string model_id = "henon";
    std::vector<std::string> filters = {"lgbf"};
    std::vector<int> grid_counts;  // empty -> per-model default
    int particles = 0;             // 0 -> product of grid counts
    double kappa = 5.0;
    int mc_runs = 100;
    int steps = 10;
    std::uint64_t seed = 1;
    std::string out_dir;  // empty -> $GRIDFLOW_OUT or "."
    bool debug_dump = false;
    ModelParams model_params;

    int effective_particles() const {
        if (particles > 0) return particles;
        int n = 1;
        for (int c : grid_counts) n *= c;
        return n;
    }
};

/// Parses command-line flags and an optional flat key=value config file
/// (flags override file values, unknown keys are rejected). Throws
/// std::invalid_argument with the offending key named.
ExperimentConfig parse_config(const std::vector<std::string>& args);

/// Validates invariants (odd grid counts >= 3, kappa in [1,10], known
/// model/filter ids, mc_runs >= 1) and fills per-model grid defaults.
void validate_config(ExperimentConfig& cfg);

/// Serializes a config in the flat key=value format accepted by --config;
/// parse_config of the echo reproduces the config.
std::string config_echo(const ExperimentConfig& cfg);

}  // namespace gridflow
