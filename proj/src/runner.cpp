#include "polaron/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <future>
#include <sstream>
#include <thread>

#include "polaron/pathfinder.hpp"
#include "polaron/pekar.hpp"
#include "polaron/quadform.hpp"
#include "polaron/stats.hpp"

namespace polaron {

int worker_cap() {
  if (const char* env = std::getenv("POLARON_LAB_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

namespace {

// Deterministic parallel map: results land in index order regardless of the
// worker count.
template <typename Fn>
void parallel_for(int count, Fn&& fn) {
  int workers = std::min(worker_cap(), count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::future<void>> futs;
  std::atomic<int> next{0};
  for (int w = 0; w < workers; ++w)
    futs.push_back(std::async(std::launch::async, [&]() {
      for (;;) {
        int i = next.fetch_add(1);
        if (i >= count) return;
        fn(i);
      }
    }));
  for (auto& f : futs) f.get();
}

double jd(const nlohmann::json& p, const std::string& key, double dflt) {
  return p.contains(key) ? p.at(key).get<double>() : dflt;
}
long jl(const nlohmann::json& p, const std::string& key, long dflt) {
  return p.contains(key) ? p.at(key).get<long>() : dflt;
}
std::string js(const nlohmann::json& p, const std::string& key, const std::string& dflt) {
  return p.contains(key) ? p.at(key).get<std::string>() : dflt;
}

MixtureSpec spec_from_json(const nlohmann::json& p, double alpha, double t_lo, double t_hi) {
  std::string kind = js(p, "kind", "coulomb");
  if (kind == "coulomb") return MixtureSpec::coulomb_spec(alpha, t_lo, t_hi);
  if (kind == "truncated") return MixtureSpec::truncated_spec(alpha, jd(p, "cap", alpha), t_lo, t_hi);
  if (kind == "band")
    return MixtureSpec::band_spec(alpha, jd(p, "band_lo", 0.0), jd(p, "band_hi", 1.0), t_lo, t_hi);
  if (kind == "power") return MixtureSpec::power_spec(alpha, jd(p, "p", 1.0), t_lo, t_hi);
  throw ValidationError("unknown mixture kind: " + kind);
}

ChainSettings settings_from_json(const nlohmann::json& p, std::uint64_t seed) {
  ChainSettings s;
  s.t_half = jd(p, "t", 8.0);
  s.step = jd(p, "step", 1.0 / 16.0);
  s.sweeps = jl(p, "sweeps", 10000);
  s.burn_in = jl(p, "burn_in", -1);
  s.thin = jl(p, "thin", 10);
  s.seed = seed;
  return s;
}

std::string series_csv(const std::vector<double>& xs, const char* name) {
  std::ostringstream os;
  os << "index," << name << '\n';
  for (std::size_t i = 0; i < xs.size(); ++i) os << i << ',' << format_g17(xs[i]) << '\n';
  return os.str();
}

nlohmann::json mean_se_json(const MeanStderr& m) {
  return {{"mean", m.mean}, {"se", m.se}, {"n", m.n}};
}

void run_pekar(const ExperimentConfig& cfg, RunDirectory& dir, nlohmann::json& payload) {
  RadialGrid grid;
  grid.r_max = jd(cfg.parameters, "rmax", 12.0);
  grid.n = static_cast<int>(jl(cfg.parameters, "n", 2000));
  double tol = jd(cfg.parameters, "tol", 1e-9);
  int max_iter = static_cast<int>(jl(cfg.parameters, "max_iter", 800));
  auto [profile, report] = solve_pekar(grid, tol, max_iter);

  payload["g0"] = report.g0;
  payload["kinetic"] = report.kinetic;
  payload["coulomb"] = report.coulomb;
  payload["virial_ratio"] = report.virial_ratio;
  payload["residual"] = report.residual;
  payload["iterations"] = report.iterations;
  payload["grid"] = {{"r_max", grid.r_max}, {"n", grid.n}};

  std::vector<double> nodes(grid.n);
  for (int k = 0; k < grid.n; ++k) nodes[k] = grid.node(k);
  auto density = pair_distance_density(profile, nodes);
  std::ostringstream os;
  os << "r,psi0,pair_density\n";
  for (int k = 0; k < grid.n; ++k)
    os << format_g17(nodes[k]) << ',' << format_g17(profile.values[k]) << ','
       << format_g17(density[k].second) << '\n';
  dir.write_text("profile.csv", os.str());
  dir.write_text("report.json", payload.dump(2) + "\n");
}

void run_sigma2(const ExperimentConfig& cfg, RunDirectory& dir, nlohmann::json& payload) {
  if (!cfg.parameters.contains("input")) throw ValidationError("sigma2: missing --input CSV");
  double t_lo = jd(cfg.parameters, "t_lo", 0.0);
  double t_hi = jd(cfg.parameters, "t_hi", 0.0);
  IntervalConfig config = load_intervals_csv(js(cfg.parameters, "input", ""), t_lo, t_hi);
  auto sol = sigma2_exact(config);
  payload["value"] = sol.value;
  payload["per_coordinate"] = sol.per_coordinate;
  payload["residual"] = sol.residual;
  payload["bandwidth"] = sol.bandwidth;
  payload["used_woodbury"] = sol.used_woodbury;
  std::ostringstream os;
  os << "breakpoint,f_value\n";
  for (const auto& [b, f] : sol.optimizer) os << format_g17(b) << ',' << format_g17(f) << '\n';
  dir.write_text("optimizer.csv", os.str());
  dir.write_text("value.json", payload.dump(2) + "\n");
}

ObserverConfig default_observer(double alpha) {
  ObserverConfig oc;
  oc.u_bands = {{1.0, 2.0}};
  oc.length_hist_max = 10.0;
  if (alpha > 0.0) {
    oc.check_regions.push_back({-1e30, 1e30, -1e30, 1e30, 0.0});
    oc.laplace.push_back({{0.0, 2.0, 0.0, 2.0, 0.0}, 0.5});
  }
  return oc;
}

void run_gibbs(const ExperimentConfig& cfg, RunDirectory& dir, nlohmann::json& payload) {
  ChainSettings s = settings_from_json(cfg.parameters, cfg.seed);
  double alpha = jd(cfg.parameters, "alpha", 1.0);
  auto spec = spec_from_json(cfg.parameters, alpha, -s.t_half, s.t_half);
  auto sum = run_chain(spec, s.grid(), s.params(), default_observer(alpha));

  dir.write_text("disp2_over_len.csv", series_csv(sum.disp2_over_len, "disp2_over_len"));
  dir.write_text("sigma2.csv", series_csv(sum.sigma2_values, "sigma2"));
  dir.write_text("n_intervals.csv", series_csv(sum.n_intervals, "n_intervals"));
  dir.write_text("sum_lengths.csv", series_csv(sum.sum_lengths, "sum_lengths"));

  payload["spec"] = spec.describe();
  payload["grid"] = {{"t_lo", -s.t_half}, {"t_hi", s.t_half}, {"step", s.step}};
  payload["states"] = sum.states;
  payload["path_variance"] = mean_se_json(sum.path_variance());
  payload["sigma2_quadform"] = mean_se_json(sum.sigma2_chain_average());
  dir.write_text("summary.json", payload.dump(2) + "\n");
}

void run_stats(const ExperimentConfig& cfg, RunDirectory& dir, nlohmann::json& payload) {
  if (cfg.parameters.contains("chain_dir")) {
    // Recorded chain: recompute the scalar estimators from the series.
    std::filesystem::path src = js(cfg.parameters, "chain_dir", "");
    auto read_series = [&](const std::string& name) {
      std::ifstream in(src / name);
      if (!in) throw ValidationError("stats: missing " + (src / name).string());
      std::vector<double> xs;
      std::string line;
      std::getline(in, line);
      while (std::getline(in, line)) {
        auto comma = line.find(',');
        if (comma != std::string::npos) xs.push_back(std::stod(line.substr(comma + 1)));
      }
      return xs;
    };
    auto disp2 = read_series("disp2_over_len.csv");
    auto sigma2 = read_series("sigma2.csv");
    payload["path_variance"] = mean_se_json(batch_mean_stderr(disp2));
    payload["sigma2_quadform"] = mean_se_json(batch_mean_stderr(sigma2));
    dir.write_text("variance.json", payload.dump(2) + "\n");
    return;
  }
  ChainSettings s = settings_from_json(cfg.parameters, cfg.seed);
  double alpha = jd(cfg.parameters, "alpha", 1.0);
  auto spec = spec_from_json(cfg.parameters, alpha, -s.t_half, s.t_half);
  ObserverConfig oc = default_observer(alpha);
  oc.increment_hist = alpha > 0.0;
  oc.incr_s_lo = 0.0;
  oc.incr_s_hi = 2.0;
  oc.incr_t_lo = 0.0;
  oc.incr_t_hi = 2.0;
  auto sum = run_chain(spec, s.grid(), s.params(), oc);

  payload["path_variance"] = mean_se_json(sum.path_variance());
  payload["sigma2_quadform"] = mean_se_json(sum.sigma2_chain_average());
  payload["count_per_unit_time"] = mean_se_json(sum.count_per_unit_time());
  if (alpha > 0.0) {
    payload["density_ratio"] = mean_se_json(sum.density_ratio());
    payload["u_band_rate_1_2"] = mean_se_json(sum.u_band_rate(0));
    payload["length_ks_exp1"] = sum.length_ks_exp1();
    payload["laplace_z"] =
        z_difference(batch_mean_stderr(sum.laplace_lhs[0]), batch_mean_stderr(sum.laplace_rhs[0]));
    payload["count_vs_intensity_z"] = z_difference(batch_mean_stderr(sum.region_counts[0]),
                                                   batch_mean_stderr(sum.region_intensities[0]));
  }
  auto astar = a_star_report();
  payload["a_star"] = {{"quadrature", astar.quadrature},
                       {"closed_form", astar.closed_form},
                       {"stated_bracket", {astar.stated_lo, astar.stated_hi}}};

  std::ostringstream ecdf;
  ecdf << "a,fraction\n";
  for (const auto& [a, f] : sum.length_ecdf()) ecdf << format_g17(a) << ',' << format_g17(f) << '\n';
  dir.write_text("length_ecdf.csv", ecdf.str());
  dir.write_text("stats.json", payload.dump(2) + "\n");
}

void run_scaling(const ExperimentConfig& cfg, RunDirectory& dir, nlohmann::json& payload) {
  std::vector<double> alphas = cfg.parameters.contains("alphas")
                                   ? cfg.parameters.at("alphas").get<std::vector<double>>()
                                   : std::vector<double>{2.0, 4.0, 8.0};
  if (alphas.size() < 3) throw ValidationError("scaling: need >= 3 alphas");
  double span = *std::max_element(alphas.begin(), alphas.end()) /
                *std::min_element(alphas.begin(), alphas.end());
  if (span < 4.0) throw ValidationError("scaling: alphas must span at least a factor 4");
  ChainSettings s = settings_from_json(cfg.parameters, cfg.seed);

  std::vector<ChainSummary> sums(alphas.size());
  parallel_for(static_cast<int>(alphas.size()), [&](int i) {
    ChainSettings si = s;
    si.seed = s.seed + 4000 + 1000 * static_cast<std::uint64_t>(i + 1);
    auto spec = MixtureSpec::coulomb_spec(alphas[i], -s.t_half, s.t_half);
    ObserverConfig oc;
    sums[i] = run_chain(spec, si.grid(), si.params(), oc);
  });
  ScalingReport rep;
  rep.alphas = alphas;
  for (auto& sum : sums) {
    rep.sigma2_path.push_back(sum.path_variance());
    rep.sigma2_quadform.push_back(sum.sigma2_chain_average());
  }
  fit_loglog_slope(alphas, rep.sigma2_quadform, rep.loglog_slope, rep.slope_se);
  rep.slope_ci95_lo = rep.loglog_slope - 1.96 * rep.slope_se;
  rep.slope_ci95_hi = rep.loglog_slope + 1.96 * rep.slope_se;

  std::ostringstream os;
  os << "alpha,sigma2_path_mean,sigma2_path_se,sigma2_quadform_mean,sigma2_quadform_se\n";
  for (std::size_t i = 0; i < alphas.size(); ++i)
    os << format_g17(alphas[i]) << ',' << format_g17(rep.sigma2_path[i].mean) << ','
       << format_g17(rep.sigma2_path[i].se) << ',' << format_g17(rep.sigma2_quadform[i].mean) << ','
       << format_g17(rep.sigma2_quadform[i].se) << '\n';
  dir.write_text("scaling.csv", os.str());
  payload["loglog_slope"] = rep.loglog_slope;
  payload["slope_se"] = rep.slope_se;
  payload["slope_ci95"] = {rep.slope_ci95_lo, rep.slope_ci95_hi};
  payload["note"] =
      "the asymptotic strong-coupling slope -4 is not expected at desk-scale alpha; "
      "this report certifies only the sign of the trend";
  dir.write_text("slope.json", payload.dump(2) + "\n");
}

void run_fkg(const ExperimentConfig& cfg, RunDirectory& dir, nlohmann::json& payload) {
  ChainSettings s = settings_from_json(cfg.parameters, cfg.seed);
  double alpha = jd(cfg.parameters, "alpha", 1.0);
  double cap = jd(cfg.parameters, "cap", alpha);
  ObserverConfig oc;
  oc.u_bands = {{0.5, 1e12}};  // count of u >= alpha/2: coordinate-wise increasing

  auto spec_full = MixtureSpec::coulomb_spec(alpha, -s.t_half, s.t_half);
  auto spec_trunc = MixtureSpec::truncated_spec(alpha, cap, -s.t_half, s.t_half);
  ChainSummary sums[2];
  parallel_for(2, [&](int i) {
    ChainSettings si = s;
    si.seed = s.seed + (i == 0 ? 71 : 72);
    sums[i] = run_chain(i == 0 ? spec_trunc : spec_full, si.grid(), si.params(), oc);
  });
  const ChainSummary& lo = sums[0];
  const ChainSummary& hi = sums[1];

  auto row = [&](const char* name, MeanStderr a, MeanStderr b) {
    nlohmann::json j;
    j["statistic"] = name;
    j["truncated"] = mean_se_json(a);
    j["coulomb"] = mean_se_json(b);
    j["z"] = z_difference(a, b);
    return j;
  };
  nlohmann::json rows = nlohmann::json::array();
  rows.push_back(row("n_intervals", batch_mean_stderr(lo.n_intervals), batch_mean_stderr(hi.n_intervals)));
  rows.push_back(row("sum_lengths", batch_mean_stderr(lo.sum_lengths), batch_mean_stderr(hi.sum_lengths)));
  rows.push_back(row("count_u_ge_half_alpha", batch_mean_stderr(lo.u_band_counts[0]),
                     batch_mean_stderr(hi.u_band_counts[0])));
  rows.push_back(row("disp2_over_len", batch_mean_stderr(lo.disp2_over_len),
                     batch_mean_stderr(hi.disp2_over_len)));
  payload["rows"] = rows;
  dir.write_text("fkg.json", payload.dump(2) + "\n");

  std::ostringstream os;
  os << "statistic,truncated_mean,truncated_se,coulomb_mean,coulomb_se,z\n";
  for (const auto& r : rows)
    os << r["statistic"].get<std::string>() << ',' << format_g17(r["truncated"]["mean"].get<double>())
       << ',' << format_g17(r["truncated"]["se"].get<double>()) << ','
       << format_g17(r["coulomb"]["mean"].get<double>()) << ','
       << format_g17(r["coulomb"]["se"].get<double>()) << ',' << format_g17(r["z"].get<double>())
       << '\n';
  dir.write_text("fkg.csv", os.str());
}

void run_subadd(const ExperimentConfig& cfg, RunDirectory& dir, nlohmann::json& payload) {
  ChainSettings s = settings_from_json(cfg.parameters, cfg.seed);
  double t1 = jd(cfg.parameters, "t1", 4.0);
  double t2 = jd(cfg.parameters, "t2", 4.0);
  double alpha = jd(cfg.parameters, "alpha", 1.0);
  auto rep = subadditivity_experiment(t1, t2, alpha, s);
  payload["t1"] = t1;
  payload["t2"] = t2;
  payload["alpha"] = alpha;
  payload["s_t1"] = mean_se_json(rep.s_t1);
  payload["s_t2"] = mean_se_json(rep.s_t2);
  payload["s_total"] = mean_se_json(rep.s_total);
  payload["gap"] = rep.gap;
  payload["gap_se"] = rep.gap_se;
  payload["note"] = "window-length-scaled values on both sides of the gap";
  dir.write_text("subadd.json", payload.dump(2) + "\n");
}

void run_pathfind(const ExperimentConfig& cfg, RunDirectory& dir, nlohmann::json& payload) {
  PathfinderParams params;
  params.alpha = jd(cfg.parameters, "alpha", 6.0);
  params.c1 = jd(cfg.parameters, "c1", 30.0);
  params.delta = jd(cfg.parameters, "delta", 0.05);
  params.block_count = static_cast<int>(jl(cfg.parameters, "blocks", 32));
  params.grid_res = jd(cfg.parameters, "grid_res", 1.0 / 256.0);
  params.validate();
  int n_seeds = static_cast<int>(jl(cfg.parameters, "seeds", 20));
  long sweeps = jl(cfg.parameters, "sweeps", 200);
  double step = jd(cfg.parameters, "step", 1.0 / 16.0);

  const double t0 = params.t0_horizon();
  std::ostringstream csv;
  csv << "seed,failed,reason,second_moment,vg_measure_min,candidates,runs\n";
  std::vector<nlohmann::json> transcripts(n_seeds);
  std::vector<std::string> csv_rows(n_seeds);
  parallel_for(n_seeds, [&](int sidx) {
    std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(sidx);
    TimeGrid grid = TimeGrid::make(-t0 / 2.0, t0 / 2.0, step);
    ChainParams cp;
    cp.sweeps = sweeps;
    cp.burn_in = sweeps - 1;
    cp.thin = 1;
    cp.seed = seed;
    auto spec = MixtureSpec::coulomb_spec(params.alpha, grid.t_lo, grid.t_hi);
    GibbsState last;
    gibbs_chain(spec, grid, cp, [&](const GibbsState& st) { last = st; });

    // Re-anchor the window [-T0/2, T0/2] to [0, T0].
    PathSample path = last.path;
    path.grid = TimeGrid::make(0.0, t0, step);
    IntervalConfig shifted;
    shifted.t_lo = 0.0;
    shifted.t_hi = t0;
    for (auto iv : last.intervals.items) {
      iv.s += t0 / 2.0;
      iv.t += t0 / 2.0;
      shifted.items.push_back(iv);
    }

    auto intensity = sstd_intensity(path, params);
    auto bad = compute_bad_sets(intensity, params);
    double vg_min = 1.0;
    for (const auto& b : bad) vg_min = std::min(vg_min, classify_points(b, params).vg_measure());
    auto runs = build_runs(shifted, bad, params);

    nlohmann::json t;
    t["seed"] = seed;
    t["failed"] = runs.failed;
    t["reason"] = runs.reason == FailureReason::none
                      ? "none"
                      : (runs.reason == FailureReason::no_candidate ? "no_candidate"
                                                                    : "bad_measure_blowup");
    t["failed_at_run"] = runs.failed_at_run;
    t["failed_at_block"] = runs.failed_at_block;
    t["second_moment"] = runs.occupancy_second_moment;
    t["vg_measure_min"] = vg_min;
    t["candidates"] = runs.candidates.size();
    nlohmann::json jruns = nlohmann::json::array();
    for (const auto& r : runs.runs) {
      nlohmann::json jr;
      jr["t0"] = r.t0;
      nlohmann::json ivs = nlohmann::json::array();
      for (const auto& iv : r.intervals) ivs.push_back({iv.s, iv.t, iv.u});
      jr["intervals"] = ivs;
      jruns.push_back(jr);
    }
    t["runs"] = jruns;
    transcripts[sidx] = t;
    std::ostringstream row;
    row << seed << ',' << (runs.failed ? 1 : 0) << ',' << t["reason"].get<std::string>() << ','
        << format_g17(runs.occupancy_second_moment) << ',' << format_g17(vg_min) << ','
        << runs.candidates.size() << ',' << runs.runs.size() << '\n';
    csv_rows[sidx] = row.str();
  });
  for (int i = 0; i < n_seeds; ++i) {
    csv << csv_rows[i];
    dir.write_text("transcript_" + std::to_string(cfg.seed + i) + ".json",
                   transcripts[i].dump(2) + "\n");
  }
  dir.write_text("summary.csv", csv.str());
  payload["seeds"] = n_seeds;
  dir.write_text("pathfind.json", payload.dump(2) + "\n");
}

}  // namespace

RunManifest run(const ExperimentConfig& cfg) {
  auto t_start = std::chrono::steady_clock::now();
  RunDirectory dir(cfg.output_dir);
  nlohmann::json payload;
  payload["command"] = cfg.command;
  payload["seed"] = cfg.seed;

  if (cfg.command == "pekar") {
    run_pekar(cfg, dir, payload);
  } else if (cfg.command == "sigma2") {
    run_sigma2(cfg, dir, payload);
  } else if (cfg.command == "gibbs") {
    run_gibbs(cfg, dir, payload);
  } else if (cfg.command == "stats") {
    run_stats(cfg, dir, payload);
  } else if (cfg.command == "scaling") {
    run_scaling(cfg, dir, payload);
  } else if (cfg.command == "fkg") {
    run_fkg(cfg, dir, payload);
  } else if (cfg.command == "subadd") {
    run_subadd(cfg, dir, payload);
  } else if (cfg.command == "pathfind") {
    run_pathfind(cfg, dir, payload);
  } else {
    throw ValidationError("unknown command: " + cfg.command);
  }

  RunManifest manifest;
  manifest.config = {{"command", cfg.command}, {"parameters", cfg.parameters}, {"seed", cfg.seed}};
  manifest.result = payload;
  manifest.rng_algorithm = kRngAlgorithm;
  manifest.code_version = code_version_string();
  manifest.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return dir.finalize(std::move(manifest));
}

}  // namespace polaron
