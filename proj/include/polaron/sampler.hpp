#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "polaron/intervals.hpp"
#include "polaron/mixture.hpp"
#include "polaron/rng.hpp"

// Alternating Gibbs sampler for the coupled pair (path increments, weighted
// intervals): conditional on the intervals the increments are a centered
// Gaussian with sparse banded precision; conditional on the path the
// intervals form a Poisson process with displacement-dependent intensity.

namespace polaron {

// Hard lower clamp on pair displacements (arithmetic guard only).
inline constexpr double kZFloor = 1e-6;

// In-cell-averaged displacement for the 1/z-type kinds. Averaging the
// Coulomb kernel over the in-cell wiggle g ~ N(0, tau^2 I3) gives
// E 1/|z+g| = erf(z/(sqrt(2) tau))/z = 1/z_eff; tau^2 = step/2 is the
// midpoint wiggle variance, which also restores the node-pair displacement
// variance k*step at every separation. Without the averaging the midpoint
// singularity makes exp(c/z) non-integrable and the chain can collapse onto
// a pinned configuration the continuum measure does not have; with it, both
// masses and u-draws are bounded at the resolution scale. Bounded kinds
// (band) keep the raw displacement.
double effective_pair_z(const MixtureSpec& spec, const TimeGrid& grid, double z_raw);

struct PathSample {
  TimeGrid grid;
  std::vector<double> increments;  // n_cells x 3, row-major

  double inc(int cell, int coord) const { return increments[3 * cell + coord]; }
  // Position at node i (anchored at omega(t_lo) = 0).
  std::array<double, 3> position(int node) const;
  // Positions at all nodes, flattened (n_cells+1) x 3.
  std::vector<double> node_positions() const;
  // Positions at cell midpoints, n_cells x 3.
  std::vector<double> midpoint_positions() const;
  double displacement_norm() const;  // |omega(t_hi) - omega(t_lo)|
};

struct GibbsState {
  PathSample path;
  IntervalConfig intervals;
  long sweep_index = 0;
};

// Map an interval endpoint to its grid node index; throws if off-grid.
int node_index(const TimeGrid& grid, double t);

PathSample sample_path_given_intervals(const IntervalConfig& intervals, const TimeGrid& grid,
                                       Rng& rng, int bandwidth_cap = 1 << 20);

// Per-cell-pair intensity masses m_{ij} (i < j), midpoint displacements,
// Coulomb-type kinds floored at kZFloor.
struct IntensityField {
  TimeGrid grid;
  std::vector<double> mass;  // indexed by pair_rank(i,j)
  double total = 0.0;

  static std::size_t pair_rank(int i, int j, int n_cells);
  double at(int i, int j) const;
};

IntensityField intensity_field(const PathSample& path, const MixtureSpec& spec);

// Region box for integrated intensities and interval counts.
struct Region {
  double s_lo, s_hi;  // s in [s_lo, s_hi)
  double t_lo, t_hi;  // t in [t_lo, t_hi)
  double u_min = 0.0;
};

// int_R coupling sqrt(2/pi) e^{-(t-s)} g_tail(z, u_min) ds dt over cell pairs.
double integrated_intensity(const PathSample& path, const MixtureSpec& spec, const Region& region);

long long count_in_region(const IntervalConfig& config, const Region& region);

IntervalConfig sample_intervals_given_path(const PathSample& path, const MixtureSpec& spec,
                                           Rng& rng);

struct ChainParams {
  long sweeps = 0;
  long burn_in = 0;
  long thin = 1;
  std::uint64_t seed = 0;

  void validate() const;
};

// Runs the chain from the empty configuration / free path; each sweep draws
// intervals given the path, then the path given the new intervals, and hands
// every thin-th post-burn-in state to the sink. Deterministic given seed.
void gibbs_chain(const MixtureSpec& spec, const TimeGrid& grid, const ChainParams& params,
                 const std::function<void(const GibbsState&)>& sink);

}  // namespace polaron
