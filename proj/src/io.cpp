#include "polaron/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace polaron {

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t fnv1a64_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file for hashing: " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return fnv1a64(ss.str());
}

IntervalConfig load_intervals_csv(const std::filesystem::path& path, double t_lo, double t_hi) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open interval CSV: " + path.string());
  IntervalConfig cfg;
  cfg.t_lo = t_lo;
  cfg.t_hi = t_hi;
  std::string line;
  long line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (!header_seen) {
      header_seen = true;
      continue;  // header row: s,t,u
    }
    std::istringstream ls(line);
    std::string field;
    double vals[3];
    for (int c = 0; c < 3; ++c) {
      if (!std::getline(ls, field, ',')) {
        throw std::invalid_argument("interval CSV line " + std::to_string(line_no) +
                                    ": expected 3 columns s,t,u");
      }
      try {
        vals[c] = std::stod(field);
      } catch (const std::exception&) {
        throw std::invalid_argument("interval CSV line " + std::to_string(line_no) +
                                    ": bad number '" + field + "'");
      }
    }
    WeightedInterval iv{vals[0], vals[1], vals[2]};
    if (!(iv.s < iv.t))
      throw std::invalid_argument("interval CSV line " + std::to_string(line_no) + ": s >= t");
    if (!(iv.u > 0.0))
      throw std::invalid_argument("interval CSV line " + std::to_string(line_no) + ": u <= 0");
    if (iv.s < t_lo || iv.t > t_hi)
      throw std::invalid_argument("interval CSV line " + std::to_string(line_no) +
                                  ": interval outside window");
    cfg.items.push_back(iv);
  }
  cfg.sort_by_s();
  cfg.validate();
  return cfg;
}

std::string intervals_to_csv(const IntervalConfig& config) {
  std::ostringstream os;
  os << "s,t,u\n";
  for (const auto& it : config.items)
    os << format_g17(it.s) << ',' << format_g17(it.t) << ',' << format_g17(it.u) << '\n';
  return os.str();
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json j;
  j["config"] = config;
  j["result"] = result;
  j["rng_algorithm"] = rng_algorithm;
  j["code_version"] = code_version;
  j["wall_seconds"] = wall_seconds;
  nlohmann::json files = nlohmann::json::array();
  for (const auto& [name, hash] : outputs) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    files.push_back({{"name", name}, {"fnv1a64", buf}});
  }
  j["outputs"] = files;
  return j;
}

RunDirectory::RunDirectory(std::filesystem::path final_dir) : final_(std::move(final_dir)) {
  temp_ = final_;
  temp_ += ".tmp";
  std::filesystem::remove_all(temp_);
  std::filesystem::create_directories(temp_);
}

RunDirectory::~RunDirectory() {
  if (!finalized_) std::filesystem::remove_all(temp_);
}

void RunDirectory::write_text(const std::string& name, const std::string& content) {
  std::ofstream out(temp_ / name, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + (temp_ / name).string());
  out << content;
  out.close();
  files_.push_back(name);
}

RunManifest RunDirectory::finalize(RunManifest manifest) {
  for (const auto& name : files_)
    manifest.outputs.emplace_back(name, fnv1a64_file(temp_ / name));
  std::ofstream out(temp_ / "manifest.json");
  out << manifest.to_json().dump(2) << '\n';
  out.close();
  std::filesystem::remove_all(final_);
  std::filesystem::rename(temp_, final_);
  finalized_ = true;
  return manifest;
}

std::string code_version_string() {
#ifdef POLARON_LAB_VERSION
  return POLARON_LAB_VERSION;
#else
  return "polaron-lab dev";
#endif
}

}  // namespace polaron
