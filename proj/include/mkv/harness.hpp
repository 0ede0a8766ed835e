#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "mkv/config.hpp"

namespace mkv {

const std::vector<std::string>& subcommands();

struct RunResult {
  std::filesystem::path dir;
  nlohmann::json summary;
  nlohmann::json manifest;
  bool ok = true;  // false when a pass flag failed or the solver did not converge
};

/// Runs one subcommand pipeline and writes its artifacts, the resolved config and
/// a manifest under config.output_dir. Module errors are rethrown with the stage name.
RunResult run_experiment(const std::string& subcommand, const ExperimentConfig& config);

}  // namespace mkv
