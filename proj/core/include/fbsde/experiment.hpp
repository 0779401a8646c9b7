#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fbsde {

/// Batch experiment description, normally loaded from a TOML config file.
/// See the README for the accepted keys; CLI flags override seed, output
/// directory and thread count.
struct ExperimentConfig {
    std::string command; // expand | simulate | compare | sweep | charfn
    std::string model;

    std::vector<double> eps_list{0.1};
    int order = -1;     // unset: 2 for generic models, 3 for Levy models (max 8)
    int n_steps = 512;  // master grid resolution
    int n_paths = 100000;
    std::uint64_t seed = 12345;
    int threads = 0; // 0 = hardware concurrency

    int lsmc_paths = 200000;
    int lsmc_degree = 3;
    int lsmc_steps = 256;

    bool stream_paths = false;
    int stream_limit = 16;

    std::vector<double> theta_list{0.5, 1.0, 2.0};
    std::vector<std::string> measure_files; // optional atom-table override, one file per component

    std::string out_dir = "out";

    static ExperimentConfig from_toml_file(const std::string& path);
    void check() const; // throws config_error on invalid combinations
};

/// Runs one experiment, writing the per-command CSV artifacts plus a
/// manifest.toml echoing the resolved configuration. Returns 0 on success;
/// failures surface as config_error / numeric_error.
int run_experiment(const ExperimentConfig& config);

/// Least-squares slope of log(gap) against log(eps).
double fit_loglog_slope(const std::vector<double>& eps, const std::vector<double>& gap);

} // namespace fbsde
