#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"

#include "polaron/io.hpp"
#include "polaron/rng.hpp"
#include "polaron/runner.hpp"

using namespace polaron;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  auto p = fs::temp_directory_path() / "polaron_io_test";
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("g17 formatting round-trips doubles") {
  for (double v : {0.1, 1.0 / 3.0, 1e-17, 123456.789012345678, 2.0 + std::exp(-3.0)}) {
    CHECK(std::stod(format_g17(v)) == v);
  }
}

TEST_CASE("interval CSV: round trip, diagnostics, empty file") {
  auto dir = scratch_dir();
  auto path = dir / "intervals.csv";

  IntervalConfig cfg;
  cfg.t_lo = -2.0;
  cfg.t_hi = 2.0;
  cfg.items.push_back({-1.0, 0.25, 3.5});
  cfg.items.push_back({-0.5, 1.9375, 1e6});
  {
    std::ofstream out(path);
    out << intervals_to_csv(cfg);
  }
  auto loaded = load_intervals_csv(path, -2.0, 2.0);
  REQUIRE(loaded.items.size() == cfg.items.size());
  for (std::size_t i = 0; i < cfg.items.size(); ++i) {
    CHECK(loaded.items[i].s == cfg.items[i].s);
    CHECK(loaded.items[i].t == cfg.items[i].t);
    CHECK(loaded.items[i].u == cfg.items[i].u);
  }

  {
    std::ofstream out(path);
    out << "s,t,u\n0.1,0.05,3.0\n";
  }
  try {
    load_intervals_csv(path, 0.0, 1.0);
    FAIL("expected rejection");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }

  {
    std::ofstream out(path);
    out << "s,t,u\n";
  }
  CHECK(load_intervals_csv(path, 0.0, 1.0).items.empty());
}

TEST_CASE("run directories are atomic") {
  auto base = scratch_dir() / "atomic";
  fs::remove_all(base);
  {
    RunDirectory dir(base);
    dir.write_text("a.csv", "x\n1\n");
    // no finalize: simulated crash mid-run
  }
  CHECK(!fs::exists(base));
  fs::path temp = base;
  temp += ".tmp";
  CHECK(!fs::exists(temp));

  {
    RunDirectory dir(base);
    dir.write_text("a.csv", "x\n1\n");
    RunManifest m;
    m.rng_algorithm = kRngAlgorithm;
    m.code_version = code_version_string();
    auto out = dir.finalize(std::move(m));
    CHECK(out.outputs.size() == 1);
  }
  CHECK(fs::exists(base / "a.csv"));
  CHECK(fs::exists(base / "manifest.json"));
  fs::remove_all(base);
}

TEST_CASE("experiment reruns produce identical content hashes") {
  auto base = scratch_dir();
  ExperimentConfig cfg;
  cfg.command = "pekar";
  cfg.parameters = {{"rmax", 10.0}, {"n", 240}, {"tol", 1e-9}, {"max_iter", 600}};
  cfg.seed = 5;
  cfg.output_dir = base / "run1";
  auto m1 = run(cfg);
  cfg.output_dir = base / "run2";
  auto m2 = run(cfg);
  REQUIRE(m1.outputs.size() == m2.outputs.size());
  for (std::size_t i = 0; i < m1.outputs.size(); ++i) {
    CHECK(m1.outputs[i].first == m2.outputs[i].first);
    CHECK(m1.outputs[i].second == m2.outputs[i].second);
  }
  fs::remove_all(base / "run1");
  fs::remove_all(base / "run2");
}

TEST_CASE("validation failures carry the right category") {
  ExperimentConfig cfg;
  cfg.command = "does-not-exist";
  CHECK_THROWS_AS(run(cfg), ValidationError);

  ExperimentConfig s2;
  s2.command = "sigma2";
  s2.parameters = {{"t_lo", 0.0}, {"t_hi", 1.0}};
  CHECK_THROWS_AS(run(s2), ValidationError);
}
