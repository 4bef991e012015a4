#include "polaron/quadform.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "polaron/lina.hpp"

namespace polaron {

ReducedSystem reduce_breakpoints(const IntervalConfig& config) {
  config.validate();
  ReducedSystem sys;
  std::vector<double>& bp = sys.breakpoints;
  bp.push_back(config.t_lo);
  bp.push_back(config.t_hi);
  for (const auto& it : config.items) {
    bp.push_back(it.s);
    bp.push_back(it.t);
  }
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());

  const int m = static_cast<int>(bp.size()) - 1;  // unknowns: f at bp[1..m]
  sys.tri_diag.assign(m, 0.0);
  sys.tri_sub.assign(m > 1 ? m - 1 : 0, 0.0);
  // Dirichlet energy sum_j (x_j - x_{j-1})^2 / dt_j with x_0 = 0 gauge.
  for (int j = 0; j < m; ++j) {
    double w = 1.0 / (bp[j + 1] - bp[j]);
    sys.tri_diag[j] += w;
    if (j > 0) {
      sys.tri_sub[j - 1] -= w;
      sys.tri_diag[j - 1] += w;
    }
  }
  auto slot_of = [&](double t) {
    auto pos = std::lower_bound(bp.begin(), bp.end(), t);
    return static_cast<int>(pos - bp.begin()) - 1;  // -1 for t == t_lo
  };
  sys.bandwidth = 0;
  for (const auto& it : config.items) {
    ReducedSystem::Penalty p;
    p.s_slot = slot_of(it.s);
    p.t_slot = slot_of(it.t);
    p.u2 = it.u * it.u;
    sys.bandwidth = std::max(sys.bandwidth, p.t_slot - std::max(p.s_slot, 0));
    sys.penalties.push_back(p);
  }
  sys.b.assign(m, 0.0);
  sys.b[m - 1] = 1.0 / std::sqrt(config.window_length());
  return sys;
}

std::vector<double> ReducedSystem::apply(const std::vector<double>& x) const {
  const int m = unknowns();
  std::vector<double> y(m, 0.0);
  for (int j = 0; j < m; ++j) {
    y[j] += tri_diag[j] * x[j];
    if (j > 0) y[j] += tri_sub[j - 1] * x[j - 1];
    if (j + 1 < m) y[j] += tri_sub[j] * x[j + 1];
  }
  for (const auto& p : penalties) {
    double d = x[p.t_slot] - (p.s_slot >= 0 ? x[p.s_slot] : 0.0);
    d *= p.u2;
    y[p.t_slot] += d;
    if (p.s_slot >= 0) y[p.s_slot] -= d;
  }
  return y;
}

namespace {

// The solve runs in segment-increment coordinates y_j = x_j - x_{j-1}:
//   A_y = diag(1/dt_j) + sum u_i^2 1_{B_i} 1_{B_i}^T,  b_y = 1 / sqrt(len),
// with B_i the contiguous slot block (s_slot, t_slot]. At a near-hard
// constraint the optimizer's in-block increments are tiny and same-signed, so
// A_y y and the stationarity residual evaluate without the u^2-amplified
// cancellation the value-coordinate form suffers from.
struct IncrementSystem {
  std::vector<double> inv_dt;  // 1/dt_j per slot
  struct Block {
    int lo, hi;  // slots [lo, hi)
    double u2;
  };
  std::vector<Block> blocks;
  double b_entry = 0.0;

  int size() const { return static_cast<int>(inv_dt.size()); }

  std::vector<double> apply(const std::vector<double>& y) const {
    const int m = size();
    std::vector<double> out(m);
    for (int j = 0; j < m; ++j) out[j] = inv_dt[j] * y[j];
    for (const auto& bl : blocks) {
      double s = 0.0;
      for (int j = bl.lo; j < bl.hi; ++j) s += y[j];
      s *= bl.u2;
      for (int j = bl.lo; j < bl.hi; ++j) out[j] += s;
    }
    return out;
  }
};

IncrementSystem increment_form(const ReducedSystem& sys) {
  IncrementSystem inc;
  const int m = sys.unknowns();
  inc.inv_dt.resize(m);
  for (int j = 0; j < m; ++j) inc.inv_dt[j] = 1.0 / (sys.breakpoints[j + 1] - sys.breakpoints[j]);
  for (const auto& p : sys.penalties) inc.blocks.push_back({p.s_slot + 1, p.t_slot + 1, p.u2});
  inc.b_entry = sys.b.back();
  return inc;
}

std::vector<double> solve_banded(const IncrementSystem& inc) {
  const int m = inc.size();
  std::vector<int> first(m);
  for (int j = 0; j < m; ++j) first[j] = j;
  for (const auto& bl : inc.blocks)
    for (int j = bl.lo; j < bl.hi; ++j) first[j] = std::min(first[j], bl.lo);
  EnvelopeSpd a(first);
  for (int j = 0; j < m; ++j) a.at(j, j) = inc.inv_dt[j];
  for (const auto& bl : inc.blocks)
    for (int i = bl.lo; i < bl.hi; ++i)
      for (int j = bl.lo; j <= i; ++j) a.add(i, j, bl.u2);
  a.factor();
  std::vector<double> y(m, inc.b_entry);
  a.solve(y);
  // Iterative refinement keeps the residual at rounding level; crossing
  // near-hard constraints (u ~ 1e6) bottom out at ~u^2 eps, where the value
  // itself is still accurate.
  for (int pass = 0; pass < 3; ++pass) {
    auto ay = inc.apply(y);
    std::vector<double> r(m);
    double rn = 0.0;
    for (int j = 0; j < m; ++j) {
      r[j] = inc.b_entry - ay[j];
      rn += r[j] * r[j];
    }
    if (std::sqrt(rn) <= 1e-13 * std::fabs(inc.b_entry) * std::sqrt(static_cast<double>(m))) break;
    a.solve(r);
    for (int j = 0; j < m; ++j) y[j] += r[j];
  }
  return y;
}

// Diagonal-plus-low-rank Woodbury: D = diag(1/dt), columns 1_{B_i}.
std::vector<double> solve_woodbury(const IncrementSystem& inc) {
  const int m = inc.size();
  const int k = static_cast<int>(inc.blocks.size());
  std::vector<double> dt(m);
  for (int j = 0; j < m; ++j) dt[j] = 1.0 / inc.inv_dt[j];
  auto d_solve = [&](const std::vector<double>& rhs) {
    std::vector<double> x(m);
    for (int j = 0; j < m; ++j) x[j] = rhs[j] * dt[j];
    return x;
  };
  std::vector<double> b(m, inc.b_entry);
  if (k == 0) return d_solve(b);

  std::vector<double> dt_prefix(m + 1, 0.0);
  for (int j = 0; j < m; ++j) dt_prefix[j + 1] = dt_prefix[j] + dt[j];
  auto block_dot = [&](int i, const std::vector<double>& x) {
    double s = 0.0;
    for (int j = inc.blocks[i].lo; j < inc.blocks[i].hi; ++j) s += x[j];
    return s;
  };
  // Capacitance C = D_u^{-1} + V^T D^{-1} V; (i,j) entry is the dt-overlap.
  std::vector<double> cap(static_cast<std::size_t>(k) * k, 0.0);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j <= i; ++j) {
      int lo = std::max(inc.blocks[i].lo, inc.blocks[j].lo);
      int hi = std::min(inc.blocks[i].hi, inc.blocks[j].hi);
      double overlap = (hi > lo) ? dt_prefix[hi] - dt_prefix[lo] : 0.0;
      cap[static_cast<std::size_t>(i) * k + j] = overlap;
      cap[static_cast<std::size_t>(j) * k + i] = overlap;
    }
    cap[static_cast<std::size_t>(i) * k + i] += 1.0 / inc.blocks[i].u2;
  }
  bool factored = false;
  auto woodbury_apply = [&](const std::vector<double>& rhs) {
    std::vector<double> db = d_solve(rhs);
    std::vector<double> w(k);
    for (int i = 0; i < k; ++i) w[i] = block_dot(i, db);
    if (!factored) {
      dense_cholesky_solve(cap, k, w);
      factored = true;
    } else {
      dense_cholesky_resolve(cap, k, w);
    }
    std::vector<double> x = db;
    for (int i = 0; i < k; ++i)
      for (int j = inc.blocks[i].lo; j < inc.blocks[i].hi; ++j) x[j] -= dt[j] * w[i];
    return x;
  };
  std::vector<double> y = woodbury_apply(b);
  for (int pass = 0; pass < 3; ++pass) {
    auto ay = inc.apply(y);
    std::vector<double> r(m);
    double rn = 0.0;
    for (int j = 0; j < m; ++j) {
      r[j] = inc.b_entry - ay[j];
      rn += r[j] * r[j];
    }
    if (std::sqrt(rn) <= 1e-13 * std::fabs(inc.b_entry) * std::sqrt(static_cast<double>(m))) break;
    auto dy = woodbury_apply(r);
    for (int j = 0; j < m; ++j) y[j] += dy[j];
  }
  return y;
}

}  // namespace

VarianceSolution sigma2_exact(const IntervalConfig& config, const QuadformOptions& opts) {
  ReducedSystem sys = reduce_breakpoints(config);
  IncrementSystem inc = increment_form(sys);
  const int m = sys.unknowns();

  bool woodbury = false;
  if (opts.force_path == 1) {
    woodbury = false;
  } else if (opts.force_path == 2) {
    woodbury = true;
  } else {
    woodbury = sys.bandwidth > opts.banded_bandwidth_limit &&
               static_cast<int>(sys.penalties.size()) < m;
  }
  std::vector<double> y = woodbury ? solve_woodbury(inc) : solve_banded(inc);

  VarianceSolution sol;
  sol.bandwidth = sys.bandwidth;
  sol.used_woodbury = woodbury;
  double per = 0.0;
  for (int j = 0; j < m; ++j) per += inc.b_entry * y[j];
  sol.per_coordinate = per;
  sol.value = 3.0 * per;
  auto ay = inc.apply(y);
  double num = 0.0, den = 0.0;
  for (int j = 0; j < m; ++j) {
    double r = ay[j] - inc.b_entry;
    num += r * r;
    den += inc.b_entry * inc.b_entry;
  }
  sol.residual = std::sqrt(num / den);
  sol.optimizer.reserve(m + 1);
  sol.optimizer.emplace_back(sys.breakpoints[0], 0.0);
  double acc = 0.0;
  for (int j = 0; j < m; ++j) {
    acc += y[j];
    sol.optimizer.emplace_back(sys.breakpoints[j + 1], acc);
  }
  return sol;
}

void Sigma2Accumulator::add(const IntervalConfig& config) { values_.push_back(sigma2_exact(config).value); }

void Sigma2Accumulator::add_value(double v) { values_.push_back(v); }

ChainAverage Sigma2Accumulator::result() const {
  if (values_.size() < 2) throw std::invalid_argument("sigma2_chain_average: need at least 2 configs");
  ChainAverage r;
  r.count = static_cast<long>(values_.size());
  double s = 0.0;
  for (double v : values_) s += v;
  r.mean = s / r.count;
  double q = 0.0;
  for (double v : values_) q += (v - r.mean) * (v - r.mean);
  r.stderr_mean = std::sqrt(q / (r.count - 1.0) / r.count);
  return r;
}

}  // namespace polaron
