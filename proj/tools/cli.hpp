#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "vrpgp/trainer.hpp"

namespace vrpgp::cli {

enum ExitCode { kOk = 0, kRuntime = 1, kUsage = 2 };

// Experiment description read from a JSON file. Unknown keys are rejected.
// Relative paths are resolved against the config file's directory.
struct ExperimentConfig {
    train::TrainerConfig trainer;
    std::filesystem::path train_manifest;
    std::filesystem::path test_manifest;
    std::vector<train::Strategy> strategies{train::kAllStrategies.begin(), train::kAllStrategies.end()};
    int runs = 30;
    std::uint64_t bench_seed = 0;
    std::filesystem::path out = "out";

    nlohmann::ordered_json to_json() const;
    // Throws ConfigError.
    static ExperimentConfig from_json(const nlohmann::json &j, const std::filesystem::path &base_dir);
    static ExperimentConfig load(const std::filesystem::path &path);
};

// argv-style entry point (args excludes the program name).
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace vrpgp::cli
