#include "polaron/pathfinder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "polaron/special.hpp"

namespace polaron {

int PathfinderParams::cells() const {
  int c = static_cast<int>(std::llround(1.0 / grid_res));
  return c;
}

double PathfinderParams::u_lo() const { return alpha / (c1 * c1 * c1 * c1); }
double PathfinderParams::u_hi() const { return 2.0 * alpha / (c1 * c1 * c1 * c1); }
double PathfinderParams::bad_density_threshold() const {
  return alpha * alpha / (c1 * c1 * c1 * c1 * c1);
}

void PathfinderParams::validate() const {
  if (!(alpha > 0.0 && c1 > 0.0)) throw std::invalid_argument("pathfinder: alpha, c1 must be positive");
  if (!(eps < 1.0)) throw std::invalid_argument("pathfinder: eps must be < 1");
  if (!(delta * alpha * alpha >= 1.0))
    throw std::invalid_argument("pathfinder: need delta * alpha^2 >= 1");
  if (block_count < 2) throw std::invalid_argument("pathfinder: need at least 2 blocks");
  if (!(grid_res > 0.0) || cells() < 8 || std::fabs(cells() * grid_res - 1.0) > 1e-9)
    throw std::invalid_argument("pathfinder: grid_res must divide the unit interval");
}

double sstd_intensity_value(double dt, double z, const PathfinderParams& p) {
  double band;
  if (z < 1e-12) {
    band = p.u_hi() - p.u_lo();
  } else {
    band = kSqrtPiOver2 * (std::erf(p.u_hi() * z / kSqrt2) - std::erf(p.u_lo() * z / kSqrt2)) / z;
  }
  return p.alpha * kSqrt2OverPi * std::exp(-dt) * band;
}

namespace {

// Path position at arbitrary time by linear interpolation between grid nodes.
struct PathEval {
  const TimeGrid& grid;
  std::vector<double> pos;  // node positions, (n_cells+1) x 3

  explicit PathEval(const PathSample& path) : grid(path.grid), pos(path.node_positions()) {}

  void at(double t, double out[3]) const {
    double x = (t - grid.t_lo) / grid.step;
    int i = std::clamp(static_cast<int>(std::floor(x)), 0, grid.n_cells - 1);
    double frac = x - i;
    for (int d = 0; d < 3; ++d)
      out[d] = pos[3 * i + d] + frac * (pos[3 * (i + 1) + d] - pos[3 * i + d]);
  }

  double distance(double a, double b) const {
    double pa[3], pb[3];
    at(a, pa);
    at(b, pb);
    double dx = pb[0] - pa[0], dy = pb[1] - pa[1], dz = pb[2] - pa[2];
    return std::sqrt(dx * dx + dy * dy + dz * dz);
  }
};

}  // namespace

std::vector<BlockIntensity> sstd_intensity(const PathSample& path, const PathfinderParams& params) {
  params.validate();
  if (path.grid.t_lo > 0.0 || path.grid.t_hi < params.t0_horizon())
    throw std::invalid_argument("sstd_intensity: path does not cover the block horizon");
  PathEval eval(path);
  const int cells = params.cells();
  const double w = params.grid_res;
  std::vector<BlockIntensity> out(params.block_count);
  for (int k = 0; k < params.block_count; ++k) {
    BlockIntensity& blk = out[k];
    blk.k = k;
    blk.cells = cells;
    blk.lambda.resize(static_cast<std::size_t>(cells) * cells);
    for (int ia = 0; ia < cells; ++ia) {
      double a = 2.0 * k + (ia + 0.5) * w;
      for (int ib = 0; ib < cells; ++ib) {
        double b = 2.0 * k + 2.0 + (ib + 0.5) * w;
        blk.lambda[static_cast<std::size_t>(ia) * cells + ib] =
            sstd_intensity_value(b - a, eval.distance(a, b), params);
      }
    }
  }
  return out;
}

long long BadSetGrid::bad_cells() const {
  long long c = 0;
  for (auto v : mask) c += v;
  return c;
}

double BadSetGrid::measure() const {
  double w = 1.0 / cells;
  return static_cast<double>(bad_cells()) * w * w;
}

std::vector<long long> BadSetGrid::column_counts() const {
  std::vector<long long> counts(cells, 0);
  for (int ia = 0; ia < cells; ++ia) {
    long long c = 0;
    const std::uint8_t* row = mask.data() + static_cast<std::size_t>(ia) * cells;
    for (int ib = 0; ib < cells; ++ib) c += row[ib];
    counts[ia] = c;
  }
  return counts;
}

std::vector<BadSetGrid> compute_bad_sets(const std::vector<BlockIntensity>& intensity,
                                         const PathfinderParams& params) {
  const double thr = params.bad_density_threshold();
  std::vector<BadSetGrid> out(intensity.size());
  for (std::size_t k = 0; k < intensity.size(); ++k) {
    const BlockIntensity& blk = intensity[k];
    BadSetGrid& bad = out[k];
    bad.k = blk.k;
    bad.cells = blk.cells;
    bad.mask.assign(blk.lambda.size(), 0);
    for (std::size_t i = 0; i < blk.lambda.size(); ++i) bad.mask[i] = blk.lambda[i] <= thr ? 1 : 0;
  }
  return out;
}

bool count_leq_threshold(long long count, double threshold, long long scale) {
  return static_cast<double>(count) <= threshold * static_cast<double>(scale);
}

PointClasses classify_points(const BadSetGrid& bad, const PathfinderParams& params) {
  PointClasses cl;
  cl.k = bad.k;
  cl.cells = bad.cells;
  const int cells = bad.cells;
  cl.good.assign(cells, 0);
  cl.very_good.assign(cells, 0);
  auto counts = bad.column_counts();
  for (int ia = 0; ia < cells; ++ia)
    cl.good[ia] = count_leq_threshold(counts[ia], params.good_threshold, cells) ? 1 : 0;

  std::vector<long long> prefix(cells + 1, 0);
  for (int ia = 0; ia < cells; ++ia) prefix[ia + 1] = prefix[ia] + counts[ia];
  const int window_max = cells / 3;
  for (int ia = 0; ia < cells; ++ia) {
    // Cell centers represent points; eligible when the center lies in the
    // middle third [1/3, 2/3] (exact in integers: 2G <= 3(2 ia + 1) <= 4G).
    if (3 * (2 * ia + 1) < 2 * cells || 3 * (2 * ia + 1) > 4 * cells) continue;
    bool ok = true;
    for (int m = 1; m <= window_max && ia + m <= cells; ++m) {
      long long s = prefix[ia + m] - prefix[ia];
      if (!count_leq_threshold(s, params.vg_threshold,
                               static_cast<long long>(m) * cells)) {
        ok = false;
        break;
      }
    }
    cl.very_good[ia] = ok ? 1 : 0;
  }
  return cl;
}

double PointClasses::good_measure() const {
  long long c = 0;
  for (auto v : good) c += v;
  return static_cast<double>(c) / cells;
}

double PointClasses::vg_measure() const {
  long long c = 0;
  for (auto v : very_good) c += v;
  return static_cast<double>(c) / cells;
}

PropositionCheck maximal_density_bound(const BadSetGrid& s0, const BadSetGrid& s1,
                                       const PathfinderParams& params) {
  if (!(s0.measure() <= params.bad_measure_limit && s1.measure() <= params.bad_measure_limit))
    throw std::invalid_argument("maximal_density_bound: precondition mu <= limit violated");
  PropositionCheck out;
  auto cl0 = classify_points(s0, params);
  auto cl1 = classify_points(s1, params);
  const int cells = s0.cells;

  out.vg_measure = cl0.vg_measure();
  out.mostly_very_good = out.vg_measure >= 0.33;

  // Every right window [a, a+x], x <= 1/3, of a very good point is >= 90% good.
  std::vector<long long> good_prefix(cells + 1, 0);
  for (int ia = 0; ia < cells; ++ia) good_prefix[ia + 1] = good_prefix[ia] + cl0.good[ia];
  out.window_good_density = true;
  const int window_max = cells / 3;
  for (int ia = 0; ia < cells && out.window_good_density; ++ia) {
    if (!cl0.very_good[ia]) continue;
    for (int m = 1; m <= window_max && ia + m <= cells; ++m) {
      long long g = good_prefix[ia + m] - good_prefix[ia];
      if (10 * g < 9 * m) {  // g/m >= 1 - 10^-1, exact in integers
        out.window_good_density = false;
        break;
      }
    }
  }

  // Connection: for every good a of S0, mu(VG(S1) cap {b : (a,b) not in S0}) >= 0.2.
  out.min_connection = 1.0;
  for (int ia = 0; ia < cells; ++ia) {
    if (!cl0.good[ia]) continue;
    long long c = 0;
    const std::uint8_t* row = s0.mask.data() + static_cast<std::size_t>(ia) * cells;
    for (int ib = 0; ib < cells; ++ib)
      if (cl1.very_good[ib] && !row[ib]) ++c;
    out.min_connection = std::min(out.min_connection, static_cast<double>(c) / cells);
  }
  out.connected = out.min_connection >= 0.2;
  return out;
}

namespace {

struct Candidate {
  WeightedInterval iv;
  int block = 0;  // pair block: s in [2k,2k+1], t in [2k+2,2k+3]
  int s_cell = 0;
  int t_cell = 0;
  bool used = false;
};

}  // namespace

RunsResult build_runs(const IntervalConfig& intervals, const std::vector<BadSetGrid>& bad_sets,
                      const PathfinderParams& params) {
  params.validate();
  if (static_cast<int>(bad_sets.size()) != params.block_count)
    throw std::invalid_argument("build_runs: bad_sets count != block_count");
  const int cells = params.cells();
  const double w = params.grid_res;
  const int n_blocks = params.block_count;

  // Super-standard filter: u band and pair-block layout.
  std::vector<Candidate> cands;
  for (const auto& it : intervals.items) {
    if (it.u < params.u_lo() || it.u > params.u_hi()) continue;
    int k = static_cast<int>(std::floor(it.s / 2.0));
    if (k < 0 || k >= n_blocks) continue;
    double sa = it.s - 2.0 * k;
    double tb = it.t - (2.0 * k + 2.0);
    if (sa < 0.0 || sa >= 1.0 || tb < 0.0 || tb >= 1.0) continue;
    Candidate c;
    c.iv = it;
    c.block = k;
    c.s_cell = std::min(cells - 1, static_cast<int>(sa / w));
    c.t_cell = std::min(cells - 1, static_cast<int>(tb / w));
    cands.push_back(c);
  }
  std::sort(cands.begin(), cands.end(),
            [](const Candidate& a, const Candidate& b) { return a.iv.s < b.iv.s; });
  // Per block, candidates sorted by s.
  std::vector<std::vector<std::size_t>> by_block(n_blocks);
  for (std::size_t i = 0; i < cands.size(); ++i) by_block[cands[i].block].push_back(i);

  RunsResult result;
  result.candidates.reserve(cands.size());
  for (const auto& c : cands) result.candidates.push_back(c.iv);

  const int n_runs = static_cast<int>(std::floor(params.runs_target()));
  // Gap columns accrued per block from previous runs.
  std::vector<BadSetGrid> augmented = bad_sets;
  std::vector<PointClasses> classes(n_blocks);
  auto reclassify = [&](int k) { classes[k] = classify_points(augmented[k], params); };
  for (int k = 0; k < n_blocks; ++k) reclassify(k);

  auto fail = [&](FailureReason reason, int run, int block) {
    result.failed = true;
    result.reason = reason;
    result.failed_at_run = run;
    result.failed_at_block = block;
  };

  for (int run_idx = 0; run_idx < n_runs && !result.failed; ++run_idx) {
    // Failure rule (c): any augmented bad set too large.
    for (int k = 0; k < n_blocks; ++k) {
      if (augmented[k].measure() >= params.bad_measure_limit) {
        fail(FailureReason::bad_measure_blowup, run_idx, k);
        break;
      }
    }
    if (result.failed) break;

    Run run;
    // t0: smallest very good grid point of block 0 (cell left edge).
    int t0_cell = -1;
    for (int ia = 0; ia < cells; ++ia)
      if (classes[0].very_good[ia]) {
        t0_cell = ia;
        break;
      }
    if (t0_cell < 0) {
      fail(FailureReason::no_candidate, run_idx, 0);
      break;
    }
    run.t0 = (t0_cell + 0.5) * w;  // cell-center representative; block 0 starts at 0
    double prev_t = run.t0;

    for (int k = 0; k + 1 < n_blocks; ++k) {
      // Smallest admissible s in Good(S_k) cap [prev_t, 2k+1] whose interval
      // is unused and has a very good right endpoint w.r.t. S_{k+1}.
      std::size_t chosen = SIZE_MAX;
      for (std::size_t idx : by_block[k]) {
        Candidate& c = cands[idx];
        if (c.used || c.iv.s < prev_t) continue;
        if (!classes[k].good[c.s_cell]) continue;
        if (!classes[k + 1].very_good[c.t_cell]) continue;
        chosen = idx;
        break;
      }
      if (chosen == SIZE_MAX) {
        fail(FailureReason::no_candidate, run_idx, k);
        break;
      }
      Candidate& c = cands[chosen];
      c.used = true;
      run.intervals.push_back(c.iv);
      run.source_ids.push_back(chosen);
      // Augment S_k with the gap [prev_t, s] crossed with the full b-range.
      int lo = std::clamp(static_cast<int>(std::floor((prev_t - 2.0 * k) / w)), 0, cells - 1);
      int hi = std::clamp(static_cast<int>(std::floor((c.iv.s - 2.0 * k) / w)), 0, cells - 1);
      if (c.iv.s > prev_t) {
        for (int ia = lo; ia <= hi; ++ia)
          for (int ib = 0; ib < cells; ++ib) augmented[k].set(ia, ib);
        reclassify(k);
      }
      prev_t = c.iv.t;
    }
    if (!result.failed) result.runs.push_back(std::move(run));
  }

  auto occ = occupancy_profile(result, params);
  result.occupancy_second_moment = occ.second_moment;
  return result;
}

OccupancyProfile occupancy_profile(const RunsResult& result, const PathfinderParams& params) {
  OccupancyProfile prof;
  const double t0_end = params.t0_horizon();
  if (result.failed) {
    double sat = params.runs_target();
    prof.second_moment = sat * sat;
    return prof;
  }
  // Sweep over gap endpoints; +1 at gap start, -1 after gap end.
  std::vector<std::pair<double, int>> events;
  for (const auto& run : result.runs) {
    double prev_t = run.t0;
    for (const auto& iv : run.intervals) {
      events.emplace_back(prev_t, +1);
      events.emplace_back(iv.s, -1);
      prev_t = iv.t;
    }
    events.emplace_back(prev_t, +1);
    events.emplace_back(t0_end, -1);
  }
  std::sort(events.begin(), events.end());
  double x = 0.0;
  int level = 0;
  double integral = 0.0;
  prof.breakpoints.push_back(0.0);
  for (const auto& [t, d] : events) {
    if (t > x) {
      integral += static_cast<double>(level) * level * (t - x);
      prof.level.push_back(level);
      prof.breakpoints.push_back(t);
      x = t;
    }
    level += d;
  }
  if (t0_end > x) {
    integral += static_cast<double>(level) * level * (t0_end - x);
    prof.level.push_back(level);
    prof.breakpoints.push_back(t0_end);
  }
  prof.second_moment = integral / t0_end;
  return prof;
}

}  // namespace polaron
