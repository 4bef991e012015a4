#pragma once

#include <vector>

#include "polaron/intervals.hpp"

// Exact evaluation of the CLT-variance functional
//   sigma^2_T(config) = 3 sup_{f in H_T} [ 2 (f(t_hi)-f(t_lo))/sqrt(len)
//                         - int f'^2 - sum u_i^2 (f(t_i)-f(s_i))^2 ].
// The maximizer is piecewise linear between the interval endpoints, so the
// supremum reduces to a finite SPD system b^T A^{-1} b on the breakpoints.

namespace polaron {

struct ReducedSystem {
  std::vector<double> breakpoints;   // sorted, breakpoints[0] = t_lo (gauge-fixed)
  // A acting on x = f(breakpoints[1..m]); tridiagonal Dirichlet part plus
  // rank-one interval penalties (slot -1 encodes the gauge-fixed origin).
  std::vector<double> tri_diag;      // size m
  std::vector<double> tri_sub;       // size m-1
  struct Penalty {
    int s_slot;  // -1 when s == t_lo
    int t_slot;
    double u2;
  };
  std::vector<Penalty> penalties;
  std::vector<double> b;             // linear term, nonzero only in the last slot
  int bandwidth = 0;                 // max slot span of any penalty

  int unknowns() const { return static_cast<int>(tri_diag.size()); }
  // y = A x without forming A.
  std::vector<double> apply(const std::vector<double>& x) const;
};

ReducedSystem reduce_breakpoints(const IntervalConfig& config);

struct VarianceSolution {
  double value = 0.0;           // includes the factor 3
  double per_coordinate = 0.0;  // value / 3
  std::vector<std::pair<double, double>> optimizer;  // (breakpoint, f value)
  double residual = 0.0;        // ||A x - b|| / ||b||
  int bandwidth = 0;
  bool used_woodbury = false;
};

struct QuadformOptions {
  int banded_bandwidth_limit = 64;  // wider profiles switch to the Woodbury path
  int force_path = 0;               // 0 auto, 1 banded, 2 woodbury (tests)
};

VarianceSolution sigma2_exact(const IntervalConfig& config, const QuadformOptions& opts = {});

struct ChainAverage {
  double mean = 0.0;
  double stderr_mean = 0.0;
  long count = 0;
};

// Sample mean / stderr of sigma2_exact over a stream of configs.
class Sigma2Accumulator {
 public:
  void add(const IntervalConfig& config);
  void add_value(double v);
  ChainAverage result() const;  // throws if fewer than 2 values
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> values_;
};

}  // namespace polaron
