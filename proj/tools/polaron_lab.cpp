// Experiment runner for the polaron point-process laboratory.
//
// Subcommands: pekar, sigma2, gibbs, stats, scaling, fkg, subadd, pathfind.
// Every run writes CSV outputs plus manifest.json (config echo, rng algorithm,
// content hashes) into --out, atomically. Exit codes: 0 success, 2 validation
// error, 3 internal error.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "polaron/runner.hpp"

using polaron::ExperimentConfig;

namespace {

struct CommonOpts {
  std::string out = "run-out";
  std::uint64_t seed = 1;
};

void add_common(CLI::App* sub, CommonOpts& c) {
  sub->add_option("--out", c.out, "output directory");
  sub->add_option("--seed", c.seed, "RNG seed");
}

struct ChainOpts {
  double alpha = 1.0;
  std::string kind = "coulomb";
  double cap = 0.0, band_lo = 0.0, band_hi = 1.0, p = 1.0;
  double t = 8.0, step = 1.0 / 16.0;
  long sweeps = 10000, burn_in = -1, thin = 10;
};

void add_chain(CLI::App* sub, ChainOpts& o, bool with_spec = true) {
  if (with_spec) {
    sub->add_option("--alpha", o.alpha, "coupling");
    sub->add_option("--kind", o.kind, "coulomb|truncated|band|power");
    sub->add_option("--cap", o.cap, "truncated cap");
    sub->add_option("--band-lo", o.band_lo, "band lower edge");
    sub->add_option("--band-hi", o.band_hi, "band upper edge");
    sub->add_option("--p", o.p, "power exponent in (0,2)");
  }
  sub->add_option("--t", o.t, "half window; window is [-t, t]");
  sub->add_option("--step", o.step, "grid step");
  sub->add_option("--sweeps", o.sweeps, "Gibbs sweeps");
  sub->add_option("--burn-in", o.burn_in, "burn-in sweeps (-1: sweeps/4)");
  sub->add_option("--thin", o.thin, "emit every thin-th state");
}

void chain_json(const ChainOpts& o, nlohmann::json& p, bool with_spec = true) {
  if (with_spec) {
    p["alpha"] = o.alpha;
    p["kind"] = o.kind;
    if (o.cap > 0.0) p["cap"] = o.cap;
    p["band_lo"] = o.band_lo;
    p["band_hi"] = o.band_hi;
    p["p"] = o.p;
  }
  p["t"] = o.t;
  p["step"] = o.step;
  p["sweeps"] = o.sweeps;
  p["burn_in"] = o.burn_in;
  p["thin"] = o.thin;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"polaron point-process laboratory"};
  app.require_subcommand(1);

  // pekar
  auto* pekar = app.add_subcommand("pekar", "solve the radial variational problem");
  double rmax = 12.0, pk_tol = 1e-9;
  long pk_n = 2000, pk_maxit = 800;
  CommonOpts pk_common;
  pekar->add_option("--rmax", rmax, "radial cutoff");
  pekar->add_option("--n", pk_n, "grid cells");
  pekar->add_option("--tol", pk_tol, "fixed-point tolerance");
  pekar->add_option("--max-iter", pk_maxit, "iteration cap");
  add_common(pekar, pk_common);

  // sigma2
  auto* sigma2 = app.add_subcommand("sigma2", "evaluate the variance functional on a config CSV");
  std::string s2_input;
  double s2_tlo = 0.0, s2_thi = 1.0;
  CommonOpts s2_common;
  sigma2->add_option("--input", s2_input, "interval CSV (columns s,t,u)")->required();
  sigma2->add_option("--t-lo", s2_tlo, "window start")->required();
  sigma2->add_option("--t-hi", s2_thi, "window end")->required();
  add_common(sigma2, s2_common);

  // gibbs / stats
  auto* gibbs = app.add_subcommand("gibbs", "run the alternating Gibbs chain");
  ChainOpts g_opts;
  CommonOpts g_common;
  add_chain(gibbs, g_opts);
  add_common(gibbs, g_common);

  auto* stats = app.add_subcommand("stats", "interval statistics and estimators");
  ChainOpts st_opts;
  CommonOpts st_common;
  std::string st_chain_dir;
  add_chain(stats, st_opts);
  stats->add_option("--chain-dir", st_chain_dir, "recorded gibbs output directory");
  add_common(stats, st_common);

  // scaling
  auto* scaling = app.add_subcommand("scaling", "sigma^2 trend over a list of couplings");
  ChainOpts sc_opts;
  CommonOpts sc_common;
  std::vector<double> sc_alphas{2.0, 4.0, 8.0};
  scaling->add_option("--alphas", sc_alphas, "couplings");
  add_chain(scaling, sc_opts, false);
  add_common(scaling, sc_common);

  // fkg
  auto* fkg = app.add_subcommand("fkg", "nested-spec stochastic-domination experiment");
  ChainOpts fk_opts;
  CommonOpts fk_common;
  double fk_cap = 0.0;
  fkg->add_option("--alpha", fk_opts.alpha, "coupling");
  fkg->add_option("--cap", fk_cap, "truncation cap (default alpha)");
  add_chain(fkg, fk_opts, false);
  add_common(fkg, fk_common);

  // subadd
  auto* subadd = app.add_subcommand("subadd", "variance subadditivity experiment");
  ChainOpts sa_opts;
  CommonOpts sa_common;
  double sa_t1 = 4.0, sa_t2 = 4.0;
  subadd->add_option("--t1", sa_t1, "first window length");
  subadd->add_option("--t2", sa_t2, "second window length");
  subadd->add_option("--alpha", sa_opts.alpha, "coupling");
  add_chain(subadd, sa_opts, false);
  add_common(subadd, sa_common);

  // pathfind
  auto* pathfind = app.add_subcommand("pathfind", "interval-run construction transcripts");
  CommonOpts pf_common;
  double pf_alpha = 6.0, pf_c1 = 30.0, pf_delta = 0.05, pf_res = 1.0 / 256.0, pf_step = 1.0 / 16.0;
  long pf_blocks = 32, pf_seeds = 20, pf_sweeps = 200;
  pathfind->add_option("--alpha", pf_alpha, "coupling");
  pathfind->add_option("--c1", pf_c1, "C1 constant");
  pathfind->add_option("--delta", pf_delta, "runs per alpha^2");
  pathfind->add_option("--blocks", pf_blocks, "pair-block count");
  pathfind->add_option("--grid-res", pf_res, "mask cell width");
  pathfind->add_option("--seeds", pf_seeds, "number of chain seeds");
  pathfind->add_option("--sweeps", pf_sweeps, "Gibbs sweeps per seed");
  pathfind->add_option("--step", pf_step, "path grid step");
  add_common(pathfind, pf_common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;  // flag-level validation failures share the validation exit code
  }

  ExperimentConfig cfg;
  try {
    if (pekar->parsed()) {
      cfg.command = "pekar";
      cfg.parameters = {{"rmax", rmax}, {"n", pk_n}, {"tol", pk_tol}, {"max_iter", pk_maxit}};
      cfg.seed = pk_common.seed;
      cfg.output_dir = pk_common.out;
    } else if (sigma2->parsed()) {
      cfg.command = "sigma2";
      cfg.parameters = {{"input", s2_input}, {"t_lo", s2_tlo}, {"t_hi", s2_thi}};
      cfg.seed = s2_common.seed;
      cfg.output_dir = s2_common.out;
    } else if (gibbs->parsed()) {
      cfg.command = "gibbs";
      chain_json(g_opts, cfg.parameters);
      cfg.seed = g_common.seed;
      cfg.output_dir = g_common.out;
    } else if (stats->parsed()) {
      cfg.command = "stats";
      chain_json(st_opts, cfg.parameters);
      if (!st_chain_dir.empty()) cfg.parameters["chain_dir"] = st_chain_dir;
      cfg.seed = st_common.seed;
      cfg.output_dir = st_common.out;
    } else if (scaling->parsed()) {
      cfg.command = "scaling";
      chain_json(sc_opts, cfg.parameters, false);
      cfg.parameters["alphas"] = sc_alphas;
      cfg.seed = sc_common.seed;
      cfg.output_dir = sc_common.out;
    } else if (fkg->parsed()) {
      cfg.command = "fkg";
      chain_json(fk_opts, cfg.parameters, false);
      cfg.parameters["alpha"] = fk_opts.alpha;
      if (fk_cap > 0.0) cfg.parameters["cap"] = fk_cap;
      cfg.seed = fk_common.seed;
      cfg.output_dir = fk_common.out;
    } else if (subadd->parsed()) {
      cfg.command = "subadd";
      chain_json(sa_opts, cfg.parameters, false);
      cfg.parameters["alpha"] = sa_opts.alpha;
      cfg.parameters["t1"] = sa_t1;
      cfg.parameters["t2"] = sa_t2;
      cfg.seed = sa_common.seed;
      cfg.output_dir = sa_common.out;
    } else if (pathfind->parsed()) {
      cfg.command = "pathfind";
      cfg.parameters = {{"alpha", pf_alpha}, {"c1", pf_c1},       {"delta", pf_delta},
                        {"blocks", pf_blocks}, {"grid_res", pf_res}, {"seeds", pf_seeds},
                        {"sweeps", pf_sweeps}, {"step", pf_step}};
      cfg.seed = pf_common.seed;
      cfg.output_dir = pf_common.out;
    }
    auto manifest = polaron::run(cfg);
    std::cout << manifest.to_json().dump(2) << std::endl;
    return 0;
  } catch (const polaron::ValidationError& e) {
    nlohmann::json err{{"error", "validation"}, {"what", e.what()}};
    std::cerr << err.dump() << std::endl;
    return 2;
  } catch (const std::invalid_argument& e) {
    nlohmann::json err{{"error", "validation"}, {"what", e.what()}};
    std::cerr << err.dump() << std::endl;
    return 2;
  } catch (const std::exception& e) {
    nlohmann::json err{{"error", "internal"}, {"what", e.what()}};
    std::cerr << err.dump() << std::endl;
    return 3;
  }
}
