#include "polaron/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "polaron/special.hpp"

namespace polaron {

MeanStderr batch_mean_stderr(const std::vector<double>& xs, int batches) {
  MeanStderr r;
  r.n = static_cast<long>(xs.size());
  if (xs.empty()) return r;
  double s = 0.0;
  for (double x : xs) s += x;
  r.mean = s / r.n;
  int nb = std::min<long>(batches, r.n);
  if (nb < 2) {
    r.se = 0.0;
    return r;
  }
  long bsize = r.n / nb;
  std::vector<double> bm(nb, 0.0);
  for (int b = 0; b < nb; ++b) {
    double acc = 0.0;
    for (long i = b * bsize; i < (b + 1) * bsize; ++i) acc += xs[i];
    bm[b] = acc / bsize;
  }
  double mu = 0.0;
  for (double v : bm) mu += v;
  mu /= nb;
  double q = 0.0;
  for (double v : bm) q += (v - mu) * (v - mu);
  r.se = std::sqrt(q / (nb - 1.0) / nb);
  return r;
}

double z_difference(const MeanStderr& a, const MeanStderr& b) {
  double se = std::sqrt(a.se * a.se + b.se * b.se);
  if (se == 0.0) return (a.mean == b.mean) ? 0.0 : HUGE_VAL;
  return (a.mean - b.mean) / se;
}

namespace {

double integrated_intensity_mid(const std::vector<double>& mid, const TimeGrid& grid,
                                const MixtureSpec& spec, const std::vector<double>& etab,
                                const Region& region) {
  const int n = grid.n_cells;
  if (spec.coupling == 0.0) return 0.0;
  const double pref = spec.coupling * kSqrt2OverPi * grid.step * grid.step;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    double s = grid.node(i);
    if (s < region.s_lo || s >= region.s_hi) continue;
    for (int j = i + 1; j < n; ++j) {
      double t = grid.node(j);
      if (t < region.t_lo || t >= region.t_hi) continue;
      double dx = mid[3 * j] - mid[3 * i];
      double dy = mid[3 * j + 1] - mid[3 * i + 1];
      double dz = mid[3 * j + 2] - mid[3 * i + 2];
      double z = effective_pair_z(spec, grid, std::sqrt(dx * dx + dy * dy + dz * dz));
      total += pref * etab[j - i] * spec.g_tail(z, region.u_min);
    }
  }
  return total;
}

}  // namespace

ChainSummary run_chain(const MixtureSpec& spec, const TimeGrid& grid, const ChainParams& params,
                       const ObserverConfig& config) {
  ChainSummary sum;
  sum.spec = spec;
  sum.grid = grid;
  sum.alpha = spec.coupling;
  sum.region_counts.resize(config.check_regions.size());
  sum.region_intensities.resize(config.check_regions.size());
  sum.laplace_lhs.resize(config.laplace.size());
  sum.laplace_rhs.resize(config.laplace.size());
  sum.u_band_counts.resize(config.u_bands.size());
  if (config.length_hist_max > 0.0)
    sum.length_hist.assign(static_cast<std::size_t>(config.length_hist_max / grid.step) + 2, 0.0);
  if (config.increment_hist) {
    sum.incr_hist.assign(config.incr_bins, 0.0);
    sum.incr_value_max = config.incr_value_max;
  }

  std::vector<double> etab(grid.n_cells + 1);
  for (int k = 0; k <= grid.n_cells; ++k) etab[k] = std::exp(-k * grid.step);
  const double len = grid.length();
  const double alpha = spec.coupling;

  gibbs_chain(spec, grid, params, [&](const GibbsState& state) {
    ++sum.states;
    double d = state.path.displacement_norm();
    sum.disp2_over_len.push_back(d * d / len);
    if (config.sigma2) sum.sigma2_values.push_back(sigma2_exact(state.intervals).value);
    sum.n_intervals.push_back(static_cast<double>(state.intervals.items.size()));
    double slen = 0.0;
    for (const auto& it : state.intervals.items) slen += it.t - it.s;
    sum.sum_lengths.push_back(slen);

    std::vector<double> mid;
    if (!config.check_regions.empty() || !config.laplace.empty() || config.increment_hist)
      mid = state.path.midpoint_positions();
    for (std::size_t r = 0; r < config.check_regions.size(); ++r) {
      const Region& reg = config.check_regions[r];
      sum.region_counts[r].push_back(static_cast<double>(count_in_region(state.intervals, reg)));
      sum.region_intensities[r].push_back(integrated_intensity_mid(mid, grid, spec, etab, reg));
    }
    for (std::size_t r = 0; r < config.laplace.size(); ++r) {
      Region reg = config.laplace[r].region;
      reg.u_min = alpha;
      double lambda = config.laplace[r].lambda;
      double n_ab = static_cast<double>(count_in_region(state.intervals, reg));
      double big_lambda = integrated_intensity_mid(mid, grid, spec, etab, reg);
      sum.laplace_lhs[r].push_back(std::exp(-lambda * n_ab));
      sum.laplace_rhs[r].push_back(std::exp((std::exp(-lambda) - 1.0) * big_lambda));
    }
    for (std::size_t b = 0; b < config.u_bands.size(); ++b) {
      auto [A, B] = config.u_bands[b];
      double c = 0.0;
      for (const auto& it : state.intervals.items)
        if (it.u >= A * alpha && it.u <= B * alpha) c += 1.0;
      sum.u_band_counts[b].push_back(c);
    }
    if (!sum.length_hist.empty()) {
      for (const auto& it : state.intervals.items) {
        auto k = static_cast<std::size_t>(std::llround((it.t - it.s) / grid.step));
        if (k < sum.length_hist.size()) sum.length_hist[k] += 1.0;
      }
    }
    if (config.increment_hist) {
      const int n = grid.n_cells;
      const double bin_w = config.incr_value_max / config.incr_bins;
      for (int i = 0; i < n; ++i) {
        double s = grid.node(i);
        if (s < config.incr_s_lo || s >= config.incr_s_hi) continue;
        for (int j = i + 1; j < n; ++j) {
          double t = grid.node(j);
          if (t < config.incr_t_lo || t >= config.incr_t_hi) continue;
          double dx = mid[3 * j] - mid[3 * i];
          double dy = mid[3 * j + 1] - mid[3 * i + 1];
          double dz = mid[3 * j + 2] - mid[3 * i + 2];
          double v = alpha * std::sqrt(dx * dx + dy * dy + dz * dz);
          double w = etab[j - i];
          int bin = std::min(config.incr_bins - 1, static_cast<int>(v / bin_w));
          sum.incr_hist[bin] += w;
          sum.incr_weight += w;
        }
      }
    }
  });
  return sum;
}

MeanStderr ChainSummary::path_variance() const {
  if (states < 100) throw std::invalid_argument("variance_estimator_path: need >= 100 states");
  return batch_mean_stderr(disp2_over_len);
}

MeanStderr ChainSummary::sigma2_chain_average() const {
  if (sigma2_values.size() < 2) throw std::invalid_argument("sigma2_chain_average: need >= 2 configs");
  return batch_mean_stderr(sigma2_values);
}

MeanStderr ChainSummary::count_per_unit_time() const {
  auto r = batch_mean_stderr(n_intervals);
  r.mean /= grid.length();
  r.se /= grid.length();
  return r;
}

MeanStderr ChainSummary::density_ratio() const {
  auto r = count_per_unit_time();
  double a2 = alpha * alpha;
  r.mean /= a2;
  r.se /= a2;
  return r;
}

MeanStderr ChainSummary::u_band_rate(std::size_t band_index) const {
  auto r = batch_mean_stderr(u_band_counts.at(band_index));
  double denom = grid.length() * alpha * alpha;
  r.mean /= denom;
  r.se /= denom;
  return r;
}

std::vector<std::pair<double, double>> ChainSummary::length_ecdf() const {
  std::vector<std::pair<double, double>> out;
  double total = 0.0;
  for (double c : length_hist) total += c;
  if (total == 0.0) return out;
  double acc = 0.0;
  // Thresholds between lattice values: a_k = (k + 1/2) step.
  for (std::size_t k = 0; k < length_hist.size(); ++k) {
    acc += length_hist[k];
    out.emplace_back((k + 0.5) * grid.step, acc / total);
  }
  return out;
}

double ChainSummary::length_ks_exp1() const {
  double ks = 0.0;
  for (const auto& [a, f] : length_ecdf()) ks = std::fmax(ks, std::fabs(f - (1.0 - std::exp(-a))));
  return ks;
}

double ChainSummary::increment_tail_mass(double above) const {
  if (incr_weight == 0.0 || incr_hist.empty()) return 0.0;
  const int bins = static_cast<int>(incr_hist.size());
  const double width = incr_value_max / bins;
  double mass = 0.0;
  for (int b = 0; b < bins; ++b)
    if ((b + 0.5) * width > above) mass += incr_hist[b];
  return mass / incr_weight;
}

double ChainSummary::increment_w1_to(const std::vector<std::pair<double, double>>& target) const {
  if (incr_weight == 0.0 || incr_hist.empty() || target.empty()) return 0.0;
  const int bins = static_cast<int>(incr_hist.size());
  const double width = incr_value_max / bins;
  const double tw = target.size() > 1 ? target[1].first - target[0].first : 1.0;
  double target_total = 0.0;
  for (const auto& [v, d] : target) target_total += d * tw;
  double w1 = 0.0, f_chain = 0.0, f_target = 0.0;
  std::size_t ti = 0;
  for (int b = 0; b < bins; ++b) {
    double edge = (b + 1) * width;
    f_chain += incr_hist[b] / incr_weight;
    while (ti < target.size() && target[ti].first + 0.5 * tw <= edge) {
      f_target += target[ti].second * tw / target_total;
      ++ti;
    }
    w1 += std::fabs(f_chain - f_target) * width;
  }
  return w1;
}

ChainParams ChainSettings::params() const {
  ChainParams p;
  p.sweeps = sweeps;
  p.burn_in = burn_in >= 0 ? burn_in : sweeps / 4;
  p.thin = thin;
  p.seed = seed;
  return p;
}

MonotonicityReport monotonicity_experiment(const std::vector<double>& alphas,
                                           const ChainSettings& settings) {
  if (alphas.empty()) throw std::invalid_argument("monotonicity_experiment: need >= 1 alpha");
  MonotonicityReport rep;
  rep.alphas = alphas;
  ObserverConfig cfg;
  cfg.sigma2 = false;
  std::uint64_t chain_tag = 0;
  for (double a : alphas) {
    ChainSettings s = settings;
    s.seed = settings.seed + 1000 * (++chain_tag);
    auto spec = MixtureSpec::coulomb_spec(a, -settings.t_half, settings.t_half);
    auto sum = run_chain(spec, s.grid(), s.params(), cfg);
    rep.sigma2_path.push_back(sum.path_variance());
  }
  rep.ordered_within_3se = true;
  for (std::size_t i = 0; i + 1 < alphas.size(); ++i) {
    double z = z_difference(rep.sigma2_path[i + 1], rep.sigma2_path[i]);
    if (z > 3.0) {
      rep.ordered_within_3se = false;
    } else if (z > 0.0) {
      rep.inconclusive_pairs.push_back(static_cast<int>(i));
    }
  }
  return rep;
}

SubadditivityReport subadditivity_experiment(double t1, double t2, double alpha,
                                             const ChainSettings& settings) {
  if (!(t1 > 0.0 && t2 > 0.0)) throw std::invalid_argument("subadditivity: T1, T2 must be positive");
  SubadditivityReport rep;
  rep.t1 = t1;
  rep.t2 = t2;
  rep.alpha = alpha;
  ObserverConfig cfg;
  auto run_window = [&](double t_half, std::uint64_t seed_shift) {
    ChainSettings s = settings;
    s.t_half = t_half;
    s.seed = settings.seed + seed_shift;
    auto spec = MixtureSpec::coulomb_spec(alpha, -t_half, t_half);
    auto sum = run_chain(spec, s.grid(), s.params(), cfg);
    MeanStderr m = sum.sigma2_chain_average();
    m.mean *= 2.0 * t_half;  // window-length scaling on both sides of the gap
    m.se *= 2.0 * t_half;
    return m;
  };
  rep.s_t1 = run_window(t1 / 2.0, 11);
  rep.s_t2 = run_window(t2 / 2.0, 22);  // independent chain even when T2 == T1
  rep.s_total = run_window((t1 + t2) / 2.0, 33);
  rep.gap = rep.s_t1.mean + rep.s_t2.mean - rep.s_total.mean;
  rep.gap_se = std::sqrt(rep.s_t1.se * rep.s_t1.se + rep.s_t2.se * rep.s_t2.se +
                         rep.s_total.se * rep.s_total.se);
  return rep;
}

void fit_loglog_slope(const std::vector<double>& x, const std::vector<MeanStderr>& y,
                      double& slope, double& slope_se) {
  const std::size_t n = x.size();
  std::vector<double> lx(n), ly(n), w(n);
  for (std::size_t i = 0; i < n; ++i) {
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i].mean);
    double rel = (y[i].se > 0.0 && y[i].mean > 0.0) ? y[i].se / y[i].mean : 1e-6;
    w[i] = 1.0 / (rel * rel);
  }
  double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sw += w[i];
    swx += w[i] * lx[i];
    swy += w[i] * ly[i];
    swxx += w[i] * lx[i] * lx[i];
    swxy += w[i] * lx[i] * ly[i];
  }
  double det = sw * swxx - swx * swx;
  slope = (sw * swxy - swx * swy) / det;
  slope_se = std::sqrt(sw / det);
}

ScalingReport scaling_experiment(const std::vector<double>& alphas, const ChainSettings& settings) {
  if (alphas.size() < 3) throw std::invalid_argument("scaling_experiment: need >= 3 alphas");
  double lo = alphas[0], hi = alphas[0];
  for (double a : alphas) {
    lo = std::min(lo, a);
    hi = std::max(hi, a);
  }
  if (hi < 4.0 * lo)
    throw std::invalid_argument("scaling_experiment: alphas must span at least a factor 4");
  ScalingReport rep;
  rep.alphas = alphas;
  ObserverConfig cfg;
  std::uint64_t tag = 0;
  for (double a : alphas) {
    ChainSettings s = settings;
    s.seed = settings.seed + 4000 + 1000 * (++tag);
    auto spec = MixtureSpec::coulomb_spec(a, -settings.t_half, settings.t_half);
    auto sum = run_chain(spec, s.grid(), s.params(), cfg);
    rep.sigma2_path.push_back(sum.path_variance());
    rep.sigma2_quadform.push_back(sum.sigma2_chain_average());
  }
  fit_loglog_slope(alphas, rep.sigma2_quadform, rep.loglog_slope, rep.slope_se);
  rep.slope_ci95_lo = rep.loglog_slope - 1.96 * rep.slope_se;
  rep.slope_ci95_hi = rep.loglog_slope + 1.96 * rep.slope_se;
  return rep;
}

AStarReport a_star_report() {
  AStarReport r;
  // Nested Simpson over {0 <= s < t <= 3}; the inner grid tracks [s, 3].
  const int n_outer = 512, n_inner = 512;
  const double hs = 3.0 / n_outer;
  double acc = 0.0;
  for (int i = 0; i <= n_outer; ++i) {
    double s = i * hs;
    double ci = (i == 0 || i == n_outer) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    double ht = (3.0 - s) / n_inner;
    double inner = 0.0;
    for (int j = 0; j <= n_inner; ++j) {
      double cj = (j == 0 || j == n_inner) ? 1.0 : (j % 2 ? 4.0 : 2.0);
      inner += cj * std::exp(-(j * ht));
    }
    acc += ci * inner * ht / 3.0;
  }
  r.quadrature = acc * hs / 3.0;
  r.closed_form = 2.0 + std::exp(-3.0);
  return r;
}

}  // namespace polaron
