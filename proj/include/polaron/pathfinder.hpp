#pragma once

#include <cstdint>
#include <vector>

#include "polaron/intervals.hpp"
#include "polaron/sampler.hpp"

// Super-standard interval intensities on pair blocks [2k,2k+1]x[2k+2,2k+3],
// low-intensity bad sets, the Good / Very-Good point classification with its
// maximal-function criterion, and the greedy interval-run construction with
// the verbatim failure rules. Block counts here are desk-scale stand-ins for
// the alpha^10 horizon; failure rates are reported, not bounded.

namespace polaron {

struct PathfinderParams {
  double alpha = 6.0;
  double c1 = 30.0;
  double eps = 1e-2;       // confinement monitor only
  double delta = 0.05;
  int block_count = 32;
  double grid_res = 1.0 / 256.0;  // mask cell width, per unit interval

  // Constants from the construction, exposed but defaulting to the text.
  double good_threshold = 1e-1;
  double vg_threshold = 1e-3;
  double bad_measure_limit = 1e-7;

  double t0_horizon() const { return 2.0 * block_count + 1.0; }
  int cells() const;                       // mask cells per unit
  double u_lo() const;                     // alpha / c1^4
  double u_hi() const;                     // 2 alpha / c1^4
  double bad_density_threshold() const;    // alpha^2 / c1^5
  double runs_target() const { return delta * alpha * alpha; }
  void validate() const;
};

// Intensity of super-standard intervals at mask-cell centers of one block.
struct BlockIntensity {
  int k = 0;
  int cells = 0;
  std::vector<double> lambda;  // (ia * cells + ib), a in [2k,2k+1], b in [2k+2,2k+3]

  double at(int ia, int ib) const { return lambda[static_cast<std::size_t>(ia) * cells + ib]; }
};

// Closed-form super-standard intensity alpha sqrt(2/pi) e^{-(b-a)}
// int_{u_lo}^{u_hi} e^{-u^2 z^2/2} du at displacement z = |omega_b - omega_a|.
double sstd_intensity_value(double dt, double z, const PathfinderParams& params);

std::vector<BlockIntensity> sstd_intensity(const PathSample& path, const PathfinderParams& params);

struct BadSetGrid {
  int k = 0;
  int cells = 0;
  std::vector<std::uint8_t> mask;  // (ia * cells + ib), true = bad pair

  bool at(int ia, int ib) const { return mask[static_cast<std::size_t>(ia) * cells + ib] != 0; }
  void set(int ia, int ib) { mask[static_cast<std::size_t>(ia) * cells + ib] = 1; }
  long long bad_cells() const;
  double measure() const;                       // bad_cells * cell area
  std::vector<long long> column_counts() const;  // per ia
};

std::vector<BadSetGrid> compute_bad_sets(const std::vector<BlockIntensity>& intensity,
                                         const PathfinderParams& params);

struct PointClasses {
  int k = 0;
  int cells = 0;
  std::vector<std::uint8_t> good;       // per a-cell of [2k, 2k+1]
  std::vector<std::uint8_t> very_good;  // subset of the middle third

  double good_measure() const;
  double vg_measure() const;
};

// Shared integer comparators so the fast path and the literal double-loop
// oracle agree bit for bit.
bool count_leq_threshold(long long count, double threshold, long long scale);

PointClasses classify_points(const BadSetGrid& bad, const PathfinderParams& params);

// The three proposition-backed bounds, evaluated on computed classes.
struct PropositionCheck {
  double vg_measure = 0.0;
  bool mostly_very_good = false;      // vg_measure >= 0.33
  bool window_good_density = false;   // every VG right-window is >= 90% good
  double min_connection = 0.0;        // min over good a of mu(VG(S1) cap {b: (a,b) not in S0})
  bool connected = false;             // min_connection >= 0.2
  bool all_hold() const { return mostly_very_good && window_good_density && connected; }
};

PropositionCheck maximal_density_bound(const BadSetGrid& s0, const BadSetGrid& s1,
                                       const PathfinderParams& params);

enum class FailureReason { none, no_candidate, bad_measure_blowup };

struct Run {
  double t0 = 0.0;
  std::vector<WeightedInterval> intervals;  // one per pair block 0..B-2
  std::vector<std::size_t> source_ids;      // indices into the filtered candidate list
};

struct RunsResult {
  std::vector<Run> runs;  // partial transcript retained on failure
  bool failed = false;
  FailureReason reason = FailureReason::none;
  int failed_at_run = -1;
  int failed_at_block = -1;
  double occupancy_second_moment = 0.0;
  std::vector<WeightedInterval> candidates;  // super-standard filtered input
};

RunsResult build_runs(const IntervalConfig& intervals, const std::vector<BadSetGrid>& bad_sets,
                      const PathfinderParams& params);

// Occupancy U(x) = sum_L sum_j 1{x in [t_j, s_{j+1}]} (with the leading
// [t_0, s_1] and trailing [t_last, T0] gaps); failed results saturate at
// (delta alpha^2)^2 exactly.
struct OccupancyProfile {
  std::vector<double> breakpoints;
  std::vector<int> level;  // U value on [breakpoints[i], breakpoints[i+1])
  double second_moment = 0.0;
};

OccupancyProfile occupancy_profile(const RunsResult& result, const PathfinderParams& params);

}  // namespace polaron
