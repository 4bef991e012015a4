#include "polaron/sampler.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iostream>

#include "polaron/lina.hpp"
#include "polaron/special.hpp"

namespace polaron {

std::array<double, 3> PathSample::position(int node) const {
  std::array<double, 3> p{0.0, 0.0, 0.0};
  for (int c = 0; c < node; ++c)
    for (int d = 0; d < 3; ++d) p[d] += increments[3 * c + d];
  return p;
}

std::vector<double> PathSample::node_positions() const {
  std::vector<double> pos(3 * (grid.n_cells + 1), 0.0);
  for (int c = 0; c < grid.n_cells; ++c)
    for (int d = 0; d < 3; ++d) pos[3 * (c + 1) + d] = pos[3 * c + d] + increments[3 * c + d];
  return pos;
}

std::vector<double> PathSample::midpoint_positions() const {
  std::vector<double> mid(3 * grid.n_cells);
  double acc[3] = {0.0, 0.0, 0.0};
  for (int c = 0; c < grid.n_cells; ++c)
    for (int d = 0; d < 3; ++d) {
      mid[3 * c + d] = acc[d] + 0.5 * increments[3 * c + d];
      acc[d] += increments[3 * c + d];
    }
  return mid;
}

double PathSample::displacement_norm() const {
  double acc[3] = {0.0, 0.0, 0.0};
  for (int c = 0; c < grid.n_cells; ++c)
    for (int d = 0; d < 3; ++d) acc[d] += increments[3 * c + d];
  return std::sqrt(acc[0] * acc[0] + acc[1] * acc[1] + acc[2] * acc[2]);
}

double effective_pair_z(const MixtureSpec& spec, const TimeGrid& grid, double z_raw) {
  if (spec.kind == MixtureKind::band) return std::fmax(z_raw, kZFloor);
  const double tau = std::sqrt(0.5 * grid.step);
  if (z_raw < 1e-12) return tau * kSqrtPiOver2;  // limit of z / erf(z / (sqrt2 tau))
  return z_raw / std::erf(z_raw / (kSqrt2 * tau));
}

int node_index(const TimeGrid& grid, double t) {
  double pos = (t - grid.t_lo) / grid.step;
  int idx = static_cast<int>(std::llround(pos));
  if (idx < 0 || idx > grid.n_cells || std::fabs(pos - idx) > 1e-6)
    throw std::invalid_argument("interval endpoint does not lie on a grid node");
  return idx;
}

PathSample sample_path_given_intervals(const IntervalConfig& intervals, const TimeGrid& grid,
                                       Rng& rng, int bandwidth_cap) {
  const int n = grid.n_cells;
  struct Span {
    int lo, hi;  // cells [lo, hi)
    double u2;
  };
  std::vector<Span> spans;
  spans.reserve(intervals.items.size());
  for (const auto& it : intervals.items) {
    int a = node_index(grid, it.s);
    int b = node_index(grid, it.t);
    if (a >= b) throw std::invalid_argument("interval shorter than one cell");
    spans.push_back({a, b, it.u * it.u});
  }

  // Envelope profile: row i reaches back to the earliest cell sharing an
  // interval with i.
  std::vector<int> first(n);
  for (int i = 0; i < n; ++i) first[i] = i;
  for (const auto& sp : spans)
    for (int i = sp.lo; i < sp.hi; ++i) first[i] = std::min(first[i], sp.lo);

  EnvelopeSpd prec(first);
  static bool warned_dense = false;
  if (prec.profile_width() > bandwidth_cap && !warned_dense) {
    std::cerr << "[sampler] interval span " << prec.profile_width()
              << " cells exceeds bandwidth cap " << bandwidth_cap
              << "; factorization proceeds at full profile cost\n";
    warned_dense = true;
  }
  const double inv_step = 1.0 / grid.step;
  for (int i = 0; i < n; ++i) prec.at(i, i) = inv_step;
  for (const auto& sp : spans)
    for (int i = sp.lo; i < sp.hi; ++i)
      for (int j = sp.lo; j <= i; ++j) prec.add(i, j, sp.u2);
  prec.factor();

  PathSample out;
  out.grid = grid;
  out.increments.resize(3 * static_cast<std::size_t>(n));
  std::vector<double> x(n);
  for (int d = 0; d < 3; ++d) {
    for (int i = 0; i < n; ++i) x[i] = rng.normal();
    prec.solve_upper(x);  // x ~ N(0, P^{-1})
    for (int i = 0; i < n; ++i) out.increments[3 * i + d] = x[i];
  }
  return out;
}

std::size_t IntensityField::pair_rank(int i, int j, int n_cells) {
  // Pairs (i, j), 0 <= i < j < n_cells, ordered by i then j.
  auto nc = static_cast<std::size_t>(n_cells);
  auto ii = static_cast<std::size_t>(i);
  return ii * nc - ii * (ii + 1) / 2 + static_cast<std::size_t>(j - i - 1);
}

double IntensityField::at(int i, int j) const { return mass[pair_rank(i, j, grid.n_cells)]; }

namespace {

inline double pair_distance(const std::vector<double>& mid, int i, int j) {
  double dx = mid[3 * j] - mid[3 * i];
  double dy = mid[3 * j + 1] - mid[3 * i + 1];
  double dz = mid[3 * j + 2] - mid[3 * i + 2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

std::vector<double> exp_table(const TimeGrid& grid) {
  std::vector<double> tab(grid.n_cells + 1);
  for (int k = 0; k <= grid.n_cells; ++k) tab[k] = std::exp(-k * grid.step);
  return tab;
}

}  // namespace

IntensityField intensity_field(const PathSample& path, const MixtureSpec& spec) {
  const TimeGrid& grid = path.grid;
  const int n = grid.n_cells;
  IntensityField field;
  field.grid = grid;
  field.mass.resize(static_cast<std::size_t>(n) * (n - 1) / 2);
  if (spec.coupling == 0.0) return field;

  auto mid = path.midpoint_positions();
  auto etab = exp_table(grid);
  const double cell2 = grid.step * grid.step;
  const double pref = spec.coupling * kSqrt2OverPi * cell2;
  double total = 0.0;
  std::size_t r = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j, ++r) {
      double z = effective_pair_z(spec, grid, pair_distance(mid, i, j));
      double m = pref * etab[j - i] * spec.g_total(z);
      field.mass[r] = m;
      total += m;
    }
  }
  field.total = total;
  return field;
}

double integrated_intensity(const PathSample& path, const MixtureSpec& spec,
                            const Region& region) {
  const TimeGrid& grid = path.grid;
  const int n = grid.n_cells;
  if (spec.coupling == 0.0) return 0.0;
  auto mid = path.midpoint_positions();
  auto etab = exp_table(grid);
  const double pref = spec.coupling * kSqrt2OverPi * grid.step * grid.step;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    double s = grid.node(i);
    if (s < region.s_lo || s >= region.s_hi) continue;
    for (int j = i + 1; j < n; ++j) {
      double t = grid.node(j);
      if (t < region.t_lo || t >= region.t_hi) continue;
      double z = effective_pair_z(spec, grid, pair_distance(mid, i, j));
      total += pref * etab[j - i] * spec.g_tail(z, region.u_min);
    }
  }
  return total;
}

long long count_in_region(const IntervalConfig& config, const Region& region) {
  long long c = 0;
  for (const auto& it : config.items)
    if (it.s >= region.s_lo && it.s < region.s_hi && it.t >= region.t_lo && it.t < region.t_hi &&
        it.u >= region.u_min)
      ++c;
  return c;
}

IntervalConfig sample_intervals_given_path(const PathSample& path, const MixtureSpec& spec,
                                           Rng& rng) {
  const TimeGrid& grid = path.grid;
  const int n = grid.n_cells;
  IntervalConfig out;
  out.t_lo = grid.t_lo;
  out.t_hi = grid.t_hi;
  if (spec.coupling == 0.0) return out;

  auto mid = path.midpoint_positions();
  auto etab = exp_table(grid);
  const double pref = spec.coupling * kSqrt2OverPi * grid.step * grid.step;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double z = effective_pair_z(spec, grid, pair_distance(mid, i, j));
      double m = pref * etab[j - i] * spec.g_total(z);
      long long k = rng.poisson(m);
      for (long long q = 0; q < k; ++q) {
        WeightedInterval w;
        w.s = grid.node(i);
        w.t = grid.node(j);
        w.u = spec.sample_u(z, rng);
        out.items.push_back(w);
      }
    }
  }
  // Scan order already sorts by s (outer loop over i).
  return out;
}

void ChainParams::validate() const {
  if (!(sweeps > burn_in && burn_in >= 0)) throw std::invalid_argument("chain: need sweeps > burn_in >= 0");
  if (thin < 1) throw std::invalid_argument("chain: thin must be >= 1");
}

void gibbs_chain(const MixtureSpec& spec, const TimeGrid& grid, const ChainParams& params,
                 const std::function<void(const GibbsState&)>& sink) {
  params.validate();
  spec.validate();
  Rng rng(params.seed);

  GibbsState state;
  state.intervals.t_lo = grid.t_lo;
  state.intervals.t_hi = grid.t_hi;
  state.path = sample_path_given_intervals(state.intervals, grid, rng);  // free path
  for (long sweep = 1; sweep <= params.sweeps; ++sweep) {
    state.intervals = sample_intervals_given_path(state.path, spec, rng);
    state.path = sample_path_given_intervals(state.intervals, grid, rng);
    state.sweep_index = sweep;
    if (sweep > params.burn_in && (sweep - params.burn_in) % params.thin == 0) sink(state);
  }
}

}  // namespace polaron
