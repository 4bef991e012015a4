#pragma once

#include <filesystem>
#include <string>

#include "polaron/io.hpp"

#include "json.hpp"

// Experiment dispatch: validates a configuration, runs the named module and
// persists CSV outputs plus a manifest atomically. Exit-code contract:
// 0 success, 2 validation error, 3 internal error. Module-level failures
// (e.g. a pathfinder run declaring failure) are successful runs whose payload
// says failed=true.

namespace polaron {

struct ExperimentConfig {
  std::string command;          // pekar | sigma2 | gibbs | stats | scaling | fkg | subadd | pathfind
  nlohmann::json parameters;    // flag map, validated per module
  std::uint64_t seed = 1;
  std::filesystem::path output_dir = "run-out";
};

class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

RunManifest run(const ExperimentConfig& config);

// Worker cap honoring POLARON_LAB_THREADS (defaults to hardware concurrency).
int worker_cap();

}  // namespace polaron
