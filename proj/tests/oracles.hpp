#pragma once

// Independent oracles used by the test and acceptance suites. Each one
// deliberately avoids the implementation path it checks: the dense-grid
// maximizer never builds the breakpoint reduction, the coarse Pekar solver
// uses coordinate ascent instead of the SCF fixed point, and the classifier
// oracle is the literal definition as a double loop.

#include <algorithm>
#include <vector>

#include "polaron/intervals.hpp"
#include "polaron/pathfinder.hpp"
#include "polaron/pekar.hpp"
#include "polaron/special.hpp"

namespace polaron::oracles {

// Maximize 2 (f(t_hi)-f(t_lo))/sqrt(len) - int f'^2 - sum u^2 (f(t)-f(s))^2
// over piecewise-linear f on a uniform grid with n_nodes nodes (interval
// endpoints are snapped to that grid); preconditioned CG, matrix-free.
// Returns the value including the factor 3.
double dense_grid_sigma2(const IntervalConfig& config, int n_nodes = 10000, double tol = 1e-12);

// Coordinate-ascent maximizer of the discretized radial functional on its own
// grid; returns the functional value.
double coarse_pekar_g0(int n_nodes = 200, double r_max = 12.0, int max_sweeps = 6000,
                       double tol = 1e-12);

// Literal double-loop Good / Very-Good classification.
PointClasses classify_points_literal(const BadSetGrid& bad, const PathfinderParams& params);

// Simpson quadrature of the super-standard u-integral (oracle for the erf
// closed form).
double sstd_intensity_simpson(double dt, double z, const PathfinderParams& params, int panels = 512);

// Goodness-of-fit helpers for sampler tests.
double ks_statistic_sorted(const std::vector<double>& sorted, double (*cdf)(double, double),
                           double cdf_param);
struct KsResult {
  double d = 0.0;
  double pvalue = 0.0;
};
// One-sample KS against an arbitrary CDF functor.
template <typename Cdf>
KsResult ks_test(std::vector<double> xs, Cdf cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double f = cdf(xs[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  KsResult r;
  r.d = d;
  r.pvalue = ks_pvalue(d, n);
  return r;
}

// Chi-square test of integer counts against a Poisson(mean) law; bins with
// expected count < 5 are merged into the tail.
struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double pvalue = 1.0;
};
ChiSquareResult poisson_chi_square(const std::vector<long long>& counts, double mean);

}  // namespace polaron::oracles
