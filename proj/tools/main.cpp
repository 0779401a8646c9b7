#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fbsde/catalog.hpp"
#include "fbsde/errors.hpp"
#include "fbsde/experiment.hpp"
#include "fbsde/version.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Semi-analytic asymptotic expansion of FBSDEs with jumps"};
    app.set_version_flag("--version", std::string(FBSDE_VERSION));

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    int threads = -1;
    bool list_models = false;

    app.add_option("--config", config_path, "experiment config file (TOML)");
    app.add_option("--seed", seed, "override the config seed");
    app.add_option("--out", out_dir, "override the output directory");
    app.add_option("--threads", threads, "worker threads (0 = hardware)");
    app.add_flag("--list-models", list_models, "print the model catalog and exit");

    CLI11_PARSE(app, argc, argv);

    if (list_models) {
        for (const auto& name : fbsde::catalog_names()) std::cout << name << "\n";
        return 0;
    }

    try {
        if (config_path.empty()) throw fbsde::config_error("--config is required");
        fbsde::ExperimentConfig config = fbsde::ExperimentConfig::from_toml_file(config_path);
        if (app.count("--seed")) config.seed = seed;
        if (!out_dir.empty()) config.out_dir = out_dir;
        if (threads >= 0) config.threads = threads;
        return fbsde::run_experiment(config);
    } catch (const fbsde::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
