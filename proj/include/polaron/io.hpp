#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "polaron/intervals.hpp"

#include "json.hpp"

namespace polaron {

// Fixed 17-significant-digit decimal formatting; every CSV cell goes through
// this so outputs are diffable and reruns byte-identical.
std::string format_g17(double v);

std::uint64_t fnv1a64(const std::string& bytes);
std::uint64_t fnv1a64_file(const std::filesystem::path& p);

// s,t,u CSV with header; rejects bad rows with line numbers.
IntervalConfig load_intervals_csv(const std::filesystem::path& path, double t_lo, double t_hi);
std::string intervals_to_csv(const IntervalConfig& config);

struct RunManifest {
  nlohmann::json config;
  nlohmann::json result;  // module payload summary
  std::string rng_algorithm;
  std::string code_version;
  double wall_seconds = 0.0;
  std::vector<std::pair<std::string, std::uint64_t>> outputs;  // name, content hash

  nlohmann::json to_json() const;
};

// Collects output files in a temp directory and renames it into place on
// finalize, so a crashed run never leaves a partial output directory.
class RunDirectory {
 public:
  explicit RunDirectory(std::filesystem::path final_dir);
  ~RunDirectory();

  void write_text(const std::string& name, const std::string& content);
  // Computes hashes, writes manifest.json, atomically renames temp -> final.
  RunManifest finalize(RunManifest manifest);

  const std::filesystem::path& final_path() const { return final_; }

 private:
  std::filesystem::path final_;
  std::filesystem::path temp_;
  std::vector<std::string> files_;
  bool finalized_ = false;
};

std::string code_version_string();

}  // namespace polaron
