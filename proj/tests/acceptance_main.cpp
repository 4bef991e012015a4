// Acceptance suite: one pass/fail line per criterion. Chains are shared
// across criteria through the fixture cache below; every tolerance is pinned
// in code. Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "polaron/io.hpp"
#include "polaron/pathfinder.hpp"
#include "polaron/pekar.hpp"
#include "polaron/quadform.hpp"
#include "polaron/runner.hpp"
#include "polaron/stats.hpp"

using namespace polaron;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

void report_extra(const char* name, bool pass, const std::string& detail) {
  std::printf("[%s] %s: %s\n", pass ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof(buf), f, args);
  va_end(args);
  return buf;
}

double wall_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------
// Shared fixtures.

struct PekarFixture {
  RadialProfile profile;
  PekarReport report;
  double solve_seconds = 0.0;
};

const PekarFixture& pekar_main() {
  static PekarFixture fx = [] {
    PekarFixture f;
    RadialGrid grid;
    grid.r_max = 12.0;
    grid.n = 2000;
    auto t0 = std::chrono::steady_clock::now();
    auto [profile, report] = solve_pekar(grid, 1e-9, 1200);
    f.solve_seconds = wall_since(t0);
    f.profile = std::move(profile);
    f.report = report;
    return f;
  }();
  return fx;
}

struct ChainKey {
  double alpha;
  bool truncated;
  double t_half;
  double step;
  long sweeps;

  bool operator<(const ChainKey& o) const {
    return std::tie(alpha, truncated, t_half, step, sweeps) <
           std::tie(o.alpha, o.truncated, o.t_half, o.step, o.sweeps);
  }
};

const ChainSummary& chain(double alpha, long sweeps, bool truncated = false, double t_half = 8.0,
                          double step = 1.0 / 16.0) {
  static std::map<ChainKey, ChainSummary> cache;
  ChainKey key{alpha, truncated, t_half, step, sweeps};
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  TimeGrid grid = TimeGrid::make(-t_half, t_half, step);
  MixtureSpec spec = truncated ? MixtureSpec::truncated_spec(alpha, alpha, -t_half, t_half)
                               : MixtureSpec::coulomb_spec(alpha, -t_half, t_half);
  ChainParams params;
  params.sweeps = sweeps;
  params.burn_in = sweeps / 4;
  params.thin = 10;
  params.seed = 900001 + static_cast<std::uint64_t>(alpha * 64.0) + (truncated ? 7 : 0) +
                static_cast<std::uint64_t>(1.0 / step) + static_cast<std::uint64_t>(t_half);

  ObserverConfig oc;
  oc.u_bands = {{1.0, 2.0}, {0.5, 1e12}};
  oc.length_hist_max = 12.0;
  if (alpha > 0.0) {
    oc.check_regions.push_back({-1e30, 1e30, -1e30, 1e30, 0.0});
    oc.laplace.push_back({{0.0, 2.0, 0.0, 2.0, 0.0}, 0.5});
  }
  auto t0 = std::chrono::steady_clock::now();
  auto sum = run_chain(spec, grid, params, oc);
  std::printf("        [fixture] chain alpha=%.2g%s T=%g step=%g sweeps=%ld: %.1f s\n", alpha,
              truncated ? " trunc" : "", t_half, step, sweeps, wall_since(t0));
  std::fflush(stdout);
  return cache.emplace(key, std::move(sum)).first->second;
}

// ---------------------------------------------------------------------------

void criterion_1_virial() {
  const auto& fx = pekar_main();
  double dev = std::fabs(fx.report.virial_ratio - 1.0);
  bool pass = dev <= 1e-3 && fx.solve_seconds < 60.0;
  report(1, pass,
         fmt("virial |coulomb/(2 kinetic) - 1| = %.2e (<= 1e-3), solve %.1f s (< 60 s)", dev,
             fx.solve_seconds));
}

void criterion_2_g0_oracle() {
  const auto& fx = pekar_main();
  double oracle = oracles::coarse_pekar_g0();
  double dev_oracle = std::fabs(oracle - fx.report.g0) / fx.report.g0;

  RadialGrid doubled;
  doubled.r_max = 12.0;
  doubled.n = 4000;
  auto fine = solve_pekar(doubled, 1e-9, 1200);
  double dev_double = std::fabs(fine.second.g0 - fx.report.g0) / fx.report.g0;

  RadialGrid wide;
  wide.r_max = 16.0;
  wide.n = 2000;
  auto wide_solved = solve_pekar(wide, 1e-9, 1200);
  double dev_wide = std::fabs(wide_solved.second.g0 - fx.report.g0) / fx.report.g0;

  bool pass = dev_oracle <= 5e-3 && dev_double <= 5e-3 && dev_wide <= 5e-3;
  report(2, pass,
         fmt("g0=%.7f vs coarse-ascent oracle %.7f (dev %.2e), grid-doubling dev %.2e, "
             "r_max 12->16 dev %.2e (all <= 0.5%%)",
             fx.report.g0, oracle, dev_oracle, dev_double, dev_wide));
}

void criterion_3_perturbation() {
  RadialGrid grid;
  grid.r_max = 12.0;
  grid.n = 1200;
  auto v = [](double w) { return std::exp(-w); };
  auto [profile, rep] = solve_pekar(grid, 1e-11, 1500);
  double g0 = perturbed_energy(v, 0.0, grid, 1e-11, 1500);
  const double eta = 1e-3;
  double gp = perturbed_energy(v, eta, grid, 1e-11, 1500);
  double gm = perturbed_energy(v, -eta, grid, 1e-11, 1500);
  double target = pair_expectation(profile, v);
  double deriv_dev = std::fabs((gp - g0) / eta - target) / std::fabs(target);
  double second = (gp - 2.0 * g0 + gm) / (eta * eta);
  bool pass = deriv_dev <= 1e-2 && second >= -1e-6;
  report(3, pass,
         fmt("(g_eta - g_0)/eta dev %.2e (<= 1%%), second difference %.3e (>= -1e-6)", deriv_dev,
             second));
}

void criterion_4_variance_functional() {
  IntervalConfig empty;
  empty.t_lo = -8.0;
  empty.t_hi = 8.0;
  double free_dev = std::fabs(sigma2_exact(empty).value - 3.0);

  IntervalConfig hard = empty;
  hard.items.push_back({-2.0, 1.0, 1e6});
  double delta = 3.0, len = 16.0;
  double hard_dev =
      std::fabs(sigma2_exact(hard).value - 3.0 * (1.0 - delta / len)) / (3.0 * (1.0 - delta / len));

  Rng rng(7101);
  double worst_oracle = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    IntervalConfig cfg = empty;
    int k = 1 + trial % 5;
    for (int i = 0; i < k; ++i) {
      double h = 16.0 / 10000.0;
      int a = 1 + static_cast<int>(rng.uniform() * 9996);
      int b = a + 1 + static_cast<int>(rng.uniform() * (9999 - a));
      cfg.items.push_back(
          {-8.0 + a * h, -8.0 + b * h, (trial % 2 ? 4.0 : 0.7) * (0.2 + rng.uniform())});
    }
    cfg.sort_by_s();
    double exact = sigma2_exact(cfg).value;
    double oracle = oracles::dense_grid_sigma2(cfg, 10000);
    worst_oracle = std::fmax(worst_oracle, std::fabs(exact - oracle) / oracle);
  }

  int violations = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    IntervalConfig cfg = empty;
    int k = static_cast<int>(rng.uniform() * 6);
    for (int i = 0; i < k; ++i) {
      double a = -8.0 + rng.uniform() * 16.0, b = -8.0 + rng.uniform() * 16.0;
      if (a > b) std::swap(a, b);
      if (!(a < b)) continue;
      cfg.items.push_back({a, b, 3.0 * rng.uniform() + 0.05});
    }
    cfg.sort_by_s();
    double base = sigma2_exact(cfg).value;
    IntervalConfig more = cfg;
    double a = -8.0 + rng.uniform() * 16.0, b = -8.0 + rng.uniform() * 16.0;
    if (a > b) std::swap(a, b);
    if (!(a < b)) {
      --trial;
      continue;
    }
    more.items.push_back({a, b, 2.0 * rng.uniform() + 0.05});
    more.sort_by_s();
    if (sigma2_exact(more).value > base + 1e-10) ++violations;
  }

  bool pass = free_dev <= 1e-12 && hard_dev <= 1e-6 && worst_oracle <= 1e-4 && violations == 0;
  report(4, pass,
         fmt("empty dev %.1e (<=1e-12), hard-interval dev %.2e (<=1e-6), dense-oracle worst dev "
             "%.2e (<=1e-4), monotonicity violations %d/1000",
             free_dev, hard_dev, worst_oracle, violations));
}

void criterion_5_conditionals() {
  // (i) frozen zero path, band(0,1): counts over s in [0,1), t in [1,2).
  TimeGrid grid = TimeGrid::make(0.0, 2.0, 1.0 / 16.0);
  PathSample zero;
  zero.grid = grid;
  zero.increments.assign(3 * static_cast<std::size_t>(grid.n_cells), 0.0);
  auto band = MixtureSpec::band_spec(1.0, 0.0, 1.0, 0.0, 2.0);
  Region region{0.0, 1.0, 1.0, 2.0, 0.0};
  double closed_mean =
      kSqrt2OverPi * (std::exp(1.0) - 1.0) * (std::exp(1.0) - 1.0) * std::exp(-2.0);
  Rng rng(7301);
  std::vector<long long> counts(10000);
  for (auto& c : counts) c = count_in_region(sample_intervals_given_path(zero, band, rng), region);
  auto chi = oracles::poisson_chi_square(counts, closed_mean);

  // (ii) bridged increment per coordinate, 1e5 samples.
  TimeGrid g2 = TimeGrid::make(-2.0, 2.0, 1.0 / 16.0);
  IntervalConfig one;
  one.t_lo = -2.0;
  one.t_hi = 2.0;
  double s = -0.5, t = 1.0, u = 2.0;
  one.items.push_back({s, t, u});
  int a = node_index(g2, s), b = node_index(g2, t);
  std::vector<double> xs;
  xs.reserve(100002);
  Rng rng2(7302);
  for (int d = 0; d < 33334; ++d) {
    auto path = sample_path_given_intervals(one, g2, rng2);
    for (int coord = 0; coord < 3; ++coord) {
      double acc = 0.0;
      for (int c = a; c < b; ++c) acc += path.inc(c, coord);
      xs.push_back(acc);
    }
  }
  double sd = std::sqrt((t - s) / (1.0 + u * u * (t - s)));
  auto ks_bridge =
      oracles::ks_test(xs, [&](double x) { return 0.5 * (1.0 + std::erf(x / (sd * kSqrt2))); });

  // (iii) u |omega_t - omega_s| half-normal on a frozen Brownian path.
  Rng rng3(7303);
  IntervalConfig none;
  none.t_lo = -2.0;
  none.t_hi = 2.0;
  auto frozen = sample_path_given_intervals(none, g2, rng3);
  auto cou = MixtureSpec::coulomb_spec(2.0, -2.0, 2.0);
  auto mid = frozen.midpoint_positions();
  std::vector<double> products;
  while (products.size() < 20000) {
    auto cfg = sample_intervals_given_path(frozen, cou, rng3);
    for (const auto& it : cfg.items) {
      int i = node_index(g2, it.s);
      int j = node_index(g2, it.t);
      double dx = mid[3 * j] - mid[3 * i];
      double dy = mid[3 * j + 1] - mid[3 * i + 1];
      double dz = mid[3 * j + 2] - mid[3 * i + 2];
      products.push_back(
          it.u * effective_pair_z(cou, g2, std::sqrt(dx * dx + dy * dy + dz * dz)));
    }
  }
  auto ks_u = oracles::ks_test(products, [](double x) { return std::erf(x / kSqrt2); });

  bool pass = chi.pvalue > 0.01 && ks_bridge.pvalue > 0.01 && ks_u.pvalue > 0.01;
  report(5, pass,
         fmt("count chi-square p %.3f, bridged-increment KS p %.3f (n=%zu), u-marginal KS p %.3f "
             "(all > 0.01)",
             chi.pvalue, ks_bridge.pvalue, xs.size(), ks_u.pvalue));
}

void criterion_6_duality() {
  const auto& c = chain(1.0, 20000);
  double z_counts = z_difference(batch_mean_stderr(c.region_counts[0]),
                                 batch_mean_stderr(c.region_intensities[0]));
  double z_laplace =
      z_difference(batch_mean_stderr(c.laplace_lhs[0]), batch_mean_stderr(c.laplace_rhs[0]));
  bool pass = std::fabs(z_counts) <= 3.0 && std::fabs(z_laplace) <= 3.0;
  report(6, pass,
         fmt("count-vs-intensity z %.2f, Laplace-functional z %.2f (|z| <= 3)", z_counts,
             z_laplace));
}

void criterion_7_estimator_equivalence() {
  const auto& a0 = chain(0.0, 20000);
  auto pv0 = a0.path_variance();
  bool pass = std::fabs(pv0.mean - 3.0) <= 3.0 * pv0.se;
  std::string detail = fmt("alpha=0 path %.4f+-%.4f;", pv0.mean, pv0.se);
  for (double alpha : {0.5, 1.0, 2.0}) {
    const auto& c = chain(alpha, 20000);
    auto pv = c.path_variance();
    auto qf = c.sigma2_chain_average();
    double z = z_difference(pv, qf);
    double per_coord = qf.mean / 3.0;
    bool ok = std::fabs(z) <= 3.0 && per_coord > 0.0 && per_coord < 1.0;
    pass = pass && ok;
    detail +=
        fmt(" a=%.1f: path %.4f qf %.4f z %.2f pc %.3f;", alpha, pv.mean, qf.mean, z, per_coord);
  }
  report(7, pass, detail + " (|z| <= 3, per-coordinate in (0,1))");
}

void criterion_8_monotonicity_fkg() {
  std::vector<MeanStderr> pv;
  pv.push_back(chain(0.5, 20000).path_variance());
  pv.push_back(chain(1.0, 20000).path_variance());
  pv.push_back(chain(2.0, 20000).path_variance());
  pv.push_back(chain(4.0, 10000).path_variance());
  bool mono = true;
  std::string detail = "sigma2(0.5,1,2,4):";
  for (std::size_t i = 0; i < pv.size(); ++i) {
    detail += fmt(" %.3f", pv[i].mean);
    if (i > 0 && z_difference(pv[i], pv[i - 1]) > 3.0) mono = false;
  }

  const auto& full = chain(1.0, 20000);
  const auto& trunc = chain(1.0, 20000, /*truncated=*/true);
  auto z_of = [&](const std::vector<double>& lo, const std::vector<double>& hi) {
    return z_difference(batch_mean_stderr(lo), batch_mean_stderr(hi));
  };
  double z_n = z_of(trunc.n_intervals, full.n_intervals);
  double z_len = z_of(trunc.sum_lengths, full.sum_lengths);
  double z_u = z_of(trunc.u_band_counts[1], full.u_band_counts[1]);
  double z_disp = z_of(full.disp2_over_len, trunc.disp2_over_len);
  bool fkg = z_n <= 3.0 && z_len <= 3.0 && z_u <= 3.0 && z_disp <= 3.0;
  detail += fmt("; fkg z: counts %.2f lengths %.2f u>=a/2 %.2f disp2(anti) %.2f (<= 3)", z_n,
                z_len, z_u, z_disp);
  report(8, mono && fkg, detail);
}

void criterion_9_subadditivity() {
  ChainSettings s;
  s.step = 1.0 / 16.0;
  s.sweeps = 20000;
  s.thin = 10;
  s.seed = 910;
  auto rep = subadditivity_experiment(4.0, 4.0, 1.0, s);
  bool pass = rep.gap >= -3.0 * rep.gap_se;
  report(9, pass, fmt("gap %.4f +- %.4f (>= -3 SE)", rep.gap, rep.gap_se));
}

void criterion_10_interval_statistics() {
  const auto& fx = pekar_main();
  double target_density = 2.0 * fx.report.g0;
  double target_band = u_band_constant(fx.profile, 1.0, 2.0);

  const auto& c4 = chain(4.0, 10000);
  double ks = c4.length_ks_exp1();

  double dev_density[3], dev_band[3];
  int idx = 0;
  for (double alpha : {2.0, 4.0, 6.0}) {
    const auto& c = chain(alpha, alpha == 2.0 ? 20000 : 10000);
    dev_density[idx] = std::fabs(c.density_ratio().mean - target_density);
    dev_band[idx] = std::fabs(c.u_band_rate(0).mean - target_band);
    ++idx;
  }
  bool trend = dev_density[2] < dev_density[0] && dev_band[2] < dev_band[0];
  bool pass = ks <= 0.05 && trend;
  report(10, pass,
         fmt("length KS %.3f (<= 0.05); density-ratio dev to 2g0=%.4f: %.4f -> %.4f -> %.4f; "
             "u-band dev to g~0(1,2)=%.4f: %.4f -> %.4f -> %.4f (toward targets)",
             ks, target_density, dev_density[0], dev_density[1], dev_density[2], target_band,
             dev_band[0], dev_band[1], dev_band[2]));
}

void criterion_11_pathfinder() {
  PathfinderParams params;
  params.alpha = 6.0;
  params.c1 = 30.0;
  params.delta = 0.05;
  params.block_count = 4;
  params.grid_res = 1.0 / 512.0;

  // (a) classification equals the literal oracle on 100 random 512^2 masks.
  Rng rng(7501);
  int mismatches = 0;
  for (int trial = 0; trial < 100; ++trial) {
    BadSetGrid mask;
    mask.k = 0;
    mask.cells = 512;
    mask.mask.assign(512 * 512, 0);
    long long fill = static_cast<long long>(rng.uniform() * 400);
    for (long long i = 0; i < fill; ++i)
      mask.set(static_cast<int>(rng.uniform() * 512), static_cast<int>(rng.uniform() * 512));
    auto fast = classify_points(mask, params);
    auto slow = oracles::classify_points_literal(mask, params);
    for (int ia = 0; ia < 512; ++ia)
      if (fast.good[ia] != slow.good[ia] || fast.very_good[ia] != slow.very_good[ia]) ++mismatches;
  }

  // (b) proposition bounds with mu <= 1e-7: zero violations. One 512^2 cell
  // already has measure 3.8e-6, so the mu <= 1e-7 regime needs a 4096^2 grid
  // to carry any bad cell at all (there, one cell is 6e-8).
  int prop_violations = 0;
  {
    PathfinderParams fine = params;
    fine.grid_res = 1.0 / 4096.0;
    auto sparse = [&](int k) {
      BadSetGrid m;
      m.k = k;
      m.cells = 4096;
      m.mask.assign(static_cast<std::size_t>(4096) * 4096, 0);
      if (rng.uniform() < 0.75)
        m.set(static_cast<int>(rng.uniform() * 4096), static_cast<int>(rng.uniform() * 4096));
      return m;
    };
    for (int trial = 0; trial < 30; ++trial) {
      auto res = maximal_density_bound(sparse(0), sparse(1), fine);
      if (!res.all_hold()) ++prop_violations;
    }
    // empty masks at the default resolution: maximal slack
    BadSetGrid e0, e1;
    e0.cells = e1.cells = 512;
    e1.k = 1;
    e0.mask.assign(512 * 512, 0);
    e1.mask.assign(512 * 512, 0);
    if (!maximal_density_bound(e0, e1, params).all_hold()) ++prop_violations;
  }

  // (c) transcript audits: synthetic dense candidates (success path).
  int audit_violations = 0;
  {
    IntervalConfig dense;
    dense.t_lo = 0.0;
    dense.t_hi = params.t0_horizon();
    double u = 0.5 * (params.u_lo() + params.u_hi());
    for (int k = 0; k + 1 < params.block_count; ++k)
      for (int i = 0; i < 512; ++i)
        dense.items.push_back(
            {2.0 * k + (i + 0.3) / 512.0, 2.0 * (k + 1) + 0.5 + 1e-4 * (i % 7), u});
    dense.sort_by_s();
    std::vector<BadSetGrid> empty_sets(params.block_count);
    for (int k = 0; k < params.block_count; ++k) {
      empty_sets[k].k = k;
      empty_sets[k].cells = 512;
      empty_sets[k].mask.assign(512 * 512, 0);
    }
    auto res = build_runs(dense, empty_sets, params);
    if (res.failed) ++audit_violations;
    std::vector<char> used(dense.items.size(), 0);
    for (const auto& run : res.runs) {
      for (std::size_t i = 0; i < run.intervals.size(); ++i) {
        if (used[run.source_ids[i]]) ++audit_violations;  // reuse across runs
        used[run.source_ids[i]] = 1;
        const auto& iv = run.intervals[i];
        if (i > 0 && iv.s < run.intervals[i - 1].t) ++audit_violations;  // overlap within run
        int k = static_cast<int>(i);
        if (iv.t < 2.0 * k + 2.0 + 1.0 / 3.0 - 1e-12 || iv.t > 2.0 * k + 2.0 + 2.0 / 3.0 + 1e-12)
          ++audit_violations;  // right endpoint outside the middle third
      }
    }
  }

  // (d) Gibbs fixture: failure rates reported; failed runs saturate exactly.
  bool saturation_ok = true;
  double fail_rate = 0.0;
  {
    PathfinderParams gp = params;
    gp.block_count = 8;
    gp.grid_res = 1.0 / 256.0;
    const double t0 = gp.t0_horizon();
    const int n_seeds = 8;
    int failures = 0;
    for (int sidx = 0; sidx < n_seeds; ++sidx) {
      TimeGrid grid = TimeGrid::make(-t0 / 2.0, t0 / 2.0, 1.0 / 16.0);
      ChainParams cp;
      cp.sweeps = 120;
      cp.burn_in = 119;
      cp.thin = 1;
      cp.seed = 7600 + sidx;
      auto spec = MixtureSpec::coulomb_spec(gp.alpha, grid.t_lo, grid.t_hi);
      GibbsState last;
      gibbs_chain(spec, grid, cp, [&](const GibbsState& st) { last = st; });
      PathSample path = last.path;
      path.grid = TimeGrid::make(0.0, t0, 1.0 / 16.0);
      IntervalConfig shifted;
      shifted.t_lo = 0.0;
      shifted.t_hi = t0;
      for (auto iv : last.intervals.items) {
        iv.s += t0 / 2.0;
        iv.t += t0 / 2.0;
        shifted.items.push_back(iv);
      }
      auto bad = compute_bad_sets(sstd_intensity(path, gp), gp);
      auto res = build_runs(shifted, bad, gp);
      if (res.failed) {
        ++failures;
        double sat = gp.runs_target() * gp.runs_target();
        if (res.occupancy_second_moment != sat) saturation_ok = false;
      }
    }
    fail_rate = static_cast<double>(failures) / n_seeds;
  }

  bool pass = mismatches == 0 && prop_violations == 0 && audit_violations == 0 && saturation_ok;
  report(11, pass,
         fmt("oracle mismatches %d, proposition violations %d, audit violations %d, "
             "saturation exact %s (Gibbs fixture failure rate %.2f, reported)",
             mismatches, prop_violations, audit_violations, saturation_ok ? "yes" : "no",
             fail_rate));
}

void criterion_12_scaling() {
  std::vector<double> alphas{2.0, 4.0, 8.0};
  std::vector<MeanStderr> qf;
  qf.push_back(chain(2.0, 20000).sigma2_chain_average());
  qf.push_back(chain(4.0, 10000).sigma2_chain_average());
  qf.push_back(chain(8.0, 6000).sigma2_chain_average());
  double slope, se;
  fit_loglog_slope(alphas, qf, slope, se);
  double lo = slope - 1.96 * se, hi = slope + 1.96 * se;
  bool pass = slope < 0.0 && hi < 0.0;
  report(12, pass,
         fmt("log-log slope %.3f, 95%% CI [%.3f, %.3f] excludes 0; the asymptotic slope -4 "
             "(strong coupling) is out of desk-scale reach by design",
             slope, lo, hi));
}

void criterion_13_reproducibility() {
  namespace fs = std::filesystem;
  auto base = fs::temp_directory_path() / "polaron_acceptance_rerun";
  fs::remove_all(base);
  fs::create_directories(base);
  bool pass = true;
  std::string detail;

  auto rerun_identical = [&](const ExperimentConfig& cfg_in, const char* name) {
    ExperimentConfig cfg = cfg_in;
    cfg.output_dir = base / (std::string(name) + "-1");
    auto m1 = run(cfg);
    cfg.output_dir = base / (std::string(name) + "-2");
    auto m2 = run(cfg);
    bool same = m1.outputs.size() == m2.outputs.size();
    for (std::size_t i = 0; same && i < m1.outputs.size(); ++i)
      same = m1.outputs[i].first == m2.outputs[i].first &&
             m1.outputs[i].second == m2.outputs[i].second;
    pass = pass && same;
    detail += fmt("%s %s; ", name, same ? "identical" : "DIFFERS");
  };

  ExperimentConfig pk;
  pk.command = "pekar";
  pk.parameters = {{"rmax", 10.0}, {"n", 300}, {"tol", 1e-9}, {"max_iter", 600}};
  pk.seed = 5;
  rerun_identical(pk, "pekar");

  ExperimentConfig gb;
  gb.command = "gibbs";
  gb.parameters = {{"alpha", 1.0},  {"t", 2.0},       {"step", 1.0 / 8.0},
                   {"sweeps", 600}, {"burn_in", 100}, {"thin", 1}};
  gb.seed = 9;
  rerun_identical(gb, "gibbs");

  {
    auto csv = base / "cfg.csv";
    std::FILE* f = std::fopen(csv.string().c_str(), "w");
    std::fputs("s,t,u\n-1.0,0.5,2.0\n0.25,1.5,1000000\n", f);
    std::fclose(f);
    ExperimentConfig s2;
    s2.command = "sigma2";
    s2.parameters = {{"input", csv.string()}, {"t_lo", -2.0}, {"t_hi", 2.0}};
    rerun_identical(s2, "sigma2");
  }

  ExperimentConfig pf;
  pf.command = "pathfind";
  pf.parameters = {{"alpha", 6.0},  {"c1", 30.0},              {"delta", 0.05}, {"blocks", 4},
                   {"grid_res", 1.0 / 128.0}, {"seeds", 2},    {"sweeps", 40},  {"step", 1.0 / 8.0}};
  pf.seed = 17;
  rerun_identical(pf, "pathfind");

  fs::remove_all(base);
  report(13, pass, detail + "(bit-identical CSV hashes on rerun)");
}

void extra_grid_refinement() {
  const auto& coarse = chain(1.0, 20000);
  const auto& fine = chain(1.0, 5000, false, 8.0, 1.0 / 32.0);
  auto qa = coarse.sigma2_chain_average();
  auto qb = fine.sigma2_chain_average();
  auto pa = coarse.path_variance();
  auto pb = fine.path_variance();
  double ca = coarse.count_per_unit_time().mean;
  double cb = fine.count_per_unit_time().mean;
  double dq = std::fabs(qa.mean - qb.mean) / qa.mean;
  double dp = std::fabs(pa.mean - pb.mean) / pa.mean;
  double dc = std::fabs(ca - cb) / ca;
  // The quadform estimator is the precisely measurable smooth observable
  // (the path family carries ~10% statistical noise on the short fine chain
  // and is checked as a z-score); raw interval counts have an O(sqrt(step))
  // ultraviolet sensitivity at weak coupling and are reported, not gated.
  double z_path = z_difference(pa, pb);
  bool pass = dq < 0.02 && std::fabs(z_path) < 3.0;
  report_extra("grid refinement (step 1/16 -> 1/32)", pass,
               fmt("sigma2(quadform) rel change %.4f (< 0.02), sigma2(path) z %.2f (|z| < 3); "
                   "count/time rel change %.4f (reported, UV-sensitive)",
                   dq, z_path, dc));
}

void extra_increment_distribution() {
  // Tail-mass tightness trend and the Wasserstein distance to the radial
  // pair-distance target (reported, no hard tolerance at desk-scale alpha).
  double tails[3];
  double w1[3];
  const auto& fx = pekar_main();
  const int bins = 2048;
  std::vector<double> nodes(bins);
  for (int b = 0; b < bins; ++b) nodes[b] = (b + 0.5) * (40.0 / bins);
  auto target = pair_distance_density(fx.profile, nodes);
  int idx = 0;
  for (double alpha : {2.0, 4.0, 6.0}) {
    TimeGrid grid = TimeGrid::make(-4.0, 4.0, 1.0 / 16.0);
    MixtureSpec spec = MixtureSpec::coulomb_spec(alpha, -4.0, 4.0);
    ChainParams params;
    params.sweeps = 3000;
    params.burn_in = 750;
    params.thin = 10;
    params.seed = 7800 + static_cast<std::uint64_t>(alpha);
    ObserverConfig oc;
    oc.sigma2 = false;
    oc.increment_hist = true;
    oc.incr_s_lo = 0.0;
    oc.incr_s_hi = 2.0;
    oc.incr_t_lo = 0.0;
    oc.incr_t_hi = 2.0;
    oc.incr_value_max = 40.0;
    oc.incr_bins = bins;
    auto sum = run_chain(spec, grid, params, oc);
    tails[idx] = sum.increment_tail_mass(20.0);
    w1[idx] = sum.increment_w1_to(target);
    ++idx;
  }
  // At desk-scale alpha the mass of alpha|w_t - w_s| above 20 is identically
  // zero (window excursions never reach it), so the tightness trend is
  // nonincreasing rather than strictly decreasing.
  bool pass = tails[2] <= tails[0] + 1e-12 && std::isfinite(w1[0]) && std::isfinite(w1[2]);
  report_extra("rescaled-increment tightness", pass,
               fmt("tail mass above 20: %.4f -> %.4f -> %.4f (nonincreasing); W1 to radial "
                   "target: %.3f -> %.3f -> %.3f (reported)",
                   tails[0], tails[1], tails[2], w1[0], w1[1], w1[2]));
}

}  // namespace

int main() {
  std::printf("polaron lab acceptance suite\n");
  auto t0 = std::chrono::steady_clock::now();

  criterion_1_virial();
  criterion_2_g0_oracle();
  criterion_3_perturbation();
  criterion_4_variance_functional();
  criterion_5_conditionals();
  criterion_6_duality();
  criterion_7_estimator_equivalence();
  criterion_8_monotonicity_fkg();
  criterion_9_subadditivity();
  criterion_10_interval_statistics();
  criterion_11_pathfinder();
  criterion_12_scaling();
  criterion_13_reproducibility();
  extra_grid_refinement();
  extra_increment_distribution();

  std::printf("%s: %d criterion failure(s), %.0f s total\n",
              g_failures == 0 ? "SUCCESS" : "FAILURE", g_failures, wall_since(t0));
  return g_failures;
}
