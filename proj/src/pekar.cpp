#include "polaron/pekar.hpp"

#include <algorithm>
#include <cmath>

#include "polaron/lina.hpp"
#include "polaron/special.hpp"

namespace polaron {

void RadialGrid::validate() const {
  if (n < 16) throw std::invalid_argument("RadialGrid: n < 16 is too coarse");
  if (!(r_max > 0.0)) throw std::invalid_argument("RadialGrid: r_max must be positive");
}

double RadialProfile::norm() const {
  const double dr = grid.dr();
  double s = 0.0;
  for (int k = 0; k < grid.n; ++k) {
    double r = grid.node(k);
    s += r * r * values[k] * values[k];
  }
  return std::sqrt(4.0 * kPi * s * dr);
}

void RadialProfile::normalize() {
  double c = norm();
  if (!(c > 0.0)) throw std::invalid_argument("RadialProfile: cannot normalize zero profile");
  for (auto& v : values) v /= c;
  l2_norm = 1.0;
}

namespace {

// Weight on the forward difference (psi_{k+1} - psi_k)^2; midpoint radius.
inline double kin_weight(const RadialGrid& g, int k) {
  double rm = g.node(k) + 0.5 * g.dr();
  return rm * rm;
}

std::vector<double> shell_weights(const RadialProfile& p) {
  const double dr = p.grid.dr();
  std::vector<double> w(p.grid.n);
  for (int k = 0; k < p.grid.n; ++k) {
    double r = p.grid.node(k);
    w[k] = 4.0 * kPi * r * r * p.values[k] * p.values[k] * dr;
  }
  return w;
}

}  // namespace

std::vector<double> hartree_potential(const RadialProfile& p) {
  const int n = p.grid.n;
  auto w = shell_weights(p);
  std::vector<double> outer(n + 1, 0.0);
  for (int k = n - 1; k >= 0; --k) outer[k] = outer[k + 1] + w[k] / p.grid.node(k);
  std::vector<double> phi(n);
  double inner = 0.0;
  for (int k = 0; k < n; ++k) {
    inner += w[k];
    phi[k] = inner / p.grid.node(k) + outer[k + 1];
  }
  return phi;
}

double coulomb_double_integral(const RadialProfile& p) {
  auto w = shell_weights(p);
  auto phi = hartree_potential(p);
  double s = 0.0;
  for (int k = 0; k < p.grid.n; ++k) s += w[k] * phi[k];
  return s;
}

double kinetic_energy(const RadialProfile& p) {
  const int n = p.grid.n;
  const double dr = p.grid.dr();
  double s = 0.0;
  for (int k = 0; k < n; ++k) {
    double next = (k + 1 < n) ? p.values[k + 1] : 0.0;
    double d = (next - p.values[k]) / dr;
    s += kin_weight(p.grid, k) * d * d;
  }
  return 0.5 * 4.0 * kPi * s * dr;
}

namespace {

struct ScfContext {
  const RadialGrid& grid;
  // Extra pairwise kernel (eta * V angular average), empty when unperturbed.
  const std::vector<double>* kernel = nullptr;  // n*n row-major, or null

  std::vector<double> potential(const RadialProfile& p) const {
    auto phi = hartree_potential(p);
    if (kernel) {
      auto w = shell_weights(p);
      const int n = grid.n;
      for (int i = 0; i < n; ++i) {
        const double* row = kernel->data() + static_cast<std::size_t>(i) * n;
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += row[j] * w[j];
        phi[i] += s;
      }
    }
    return phi;
  }

  double pair_energy(const RadialProfile& p) const {
    auto w = shell_weights(p);
    auto phi = potential(p);
    double s = 0.0;
    for (int k = 0; k < grid.n; ++k) s += w[k] * phi[k];
    return s;
  }
};

// Ground state of H = -1/2 Lap - 2 phi on the radial grid via shifted inverse
// iteration; symmetrized with y_k = r_k psi_k.
RadialProfile scf_ground_state(const ScfContext& ctx, const RadialProfile& start,
                               const std::vector<double>& phi, int inverse_iterations) {
  const RadialGrid& g = ctx.grid;
  const int n = g.n;
  const double dr = g.dr();
  std::vector<double> diag(n), sub(n - 1);
  double vmax = 0.0;
  for (int k = 0; k < n; ++k) {
    double wm = (k == 0) ? 0.0 : kin_weight(g, k - 1);
    double r = g.node(k);
    diag[k] = (wm + kin_weight(g, k)) / (2.0 * r * r * dr * dr) - 2.0 * phi[k];
    vmax = std::max(vmax, 2.0 * phi[k]);
  }
  for (int k = 0; k + 1 < n; ++k)
    sub[k] = -kin_weight(g, k) / (2.0 * g.node(k) * g.node(k + 1) * dr * dr);
  const double sigma = -(vmax + 1.0);  // below the spectrum: H >= -max(2 phi)
  std::vector<double> shifted(n);
  for (int k = 0; k < n; ++k) shifted[k] = diag[k] - sigma;

  std::vector<double> y(n);
  for (int k = 0; k < n; ++k) y[k] = g.node(k) * start.values[k];
  for (int it = 0; it < inverse_iterations; ++it) {
    y = solve_tridiag_spd(shifted, sub, y);
    double m = 0.0;
    for (double v : y) m = std::max(m, std::fabs(v));
    for (double& v : y) v /= m;
  }
  RadialProfile out;
  out.grid = g;
  out.values.resize(n);
  for (int k = 0; k < n; ++k) out.values[k] = std::fabs(y[k]) / g.node(k);
  out.normalize();
  return out;
}

// Euler-Lagrange residual || (-1/2 Lap + mu) psi - 2 Phi psi || / || psi || in
// the radial L2 norm, mu fitted by least squares.
double el_residual(const ScfContext& ctx, const RadialProfile& p) {
  const RadialGrid& g = ctx.grid;
  const int n = g.n;
  const double dr = g.dr();
  auto phi = ctx.potential(p);
  std::vector<double> rho(n);
  for (int k = 0; k < n; ++k) {
    double r = g.node(k);
    double up = (k + 1 < n) ? p.values[k + 1] : 0.0;
    double dn = (k == 0) ? 0.0 : p.values[k - 1];
    double wm = (k == 0) ? 0.0 : kin_weight(g, k - 1);
    double lap = (wm * (p.values[k] - dn) + kin_weight(g, k) * (p.values[k] - up)) /
                 (2.0 * r * r * dr * dr);
    rho[k] = lap - 2.0 * phi[k] * p.values[k];
  }
  double num = 0.0, den = 0.0;
  for (int k = 0; k < n; ++k) {
    double m = g.node(k) * g.node(k);
    num += m * rho[k] * p.values[k];
    den += m * p.values[k] * p.values[k];
  }
  double mu = -num / den;
  double rnorm = 0.0;
  for (int k = 0; k < n; ++k) {
    double m = g.node(k) * g.node(k);
    double v = rho[k] + mu * p.values[k];
    rnorm += m * v * v;
  }
  return std::sqrt(rnorm / den);
}

struct ScfResult {
  RadialProfile profile;
  double residual;
  int iterations;
};

ScfResult run_scf(const ScfContext& ctx, double tol, int max_iter, const PekarOptions& opts,
                  const RadialProfile* warm_start) {
  ctx.grid.validate();
  if (!(tol > 0.0 && tol <= 1e-2)) throw std::invalid_argument("solve_pekar: tol outside (0, 1e-2]");
  if (max_iter < 1) throw std::invalid_argument("solve_pekar: max_iter must be >= 1");

  RadialProfile p;
  if (warm_start) {
    p = *warm_start;
  } else {
    p.grid = ctx.grid;
    p.values.resize(ctx.grid.n);
    for (int k = 0; k < ctx.grid.n; ++k) p.values[k] = std::exp(-0.5 * ctx.grid.node(k));
  }
  p.normalize();

  double delta = 0.0;
  int it = 0;
  for (; it < max_iter; ++it) {
    auto phi = ctx.potential(p);
    RadialProfile next = scf_ground_state(ctx, p, phi, opts.inverse_iterations);
    delta = 0.0;
    for (int k = 0; k < ctx.grid.n; ++k) {
      double v = p.values[k] + opts.damping * (next.values[k] - p.values[k]);
      delta = std::max(delta, std::fabs(v - p.values[k]));
      p.values[k] = v;
    }
    p.normalize();
    if (delta < tol) break;
  }
  double res = el_residual(ctx, p);
  if (delta >= tol) {
    throw SolveFailure("pekar solver did not converge within max_iter (residual " +
                           std::to_string(res) + ")",
                       res);
  }
  return {std::move(p), res, it + 1};
}

}  // namespace

RadialProfile pekar_iterate_once(const RadialProfile& profile, const PekarOptions& opts) {
  RadialProfile p = profile;
  p.normalize();
  ScfContext ctx{p.grid, nullptr};
  auto phi = ctx.potential(p);
  RadialProfile next = scf_ground_state(ctx, p, phi, opts.inverse_iterations);
  for (int k = 0; k < p.grid.n; ++k)
    p.values[k] += opts.damping * (next.values[k] - p.values[k]);
  p.normalize();
  return p;
}

std::pair<RadialProfile, PekarReport> solve_pekar(const RadialGrid& grid, double tol,
                                                  int max_iter, const PekarOptions& opts) {
  ScfContext ctx{grid, nullptr};
  ScfResult r = run_scf(ctx, tol, max_iter, opts, nullptr);
  PekarReport rep;
  rep.kinetic = kinetic_energy(r.profile);
  rep.coulomb = coulomb_double_integral(r.profile);
  rep.g0 = rep.coulomb - rep.kinetic;
  rep.virial_ratio = rep.coulomb / (2.0 * rep.kinetic);
  rep.residual = r.residual;
  rep.iterations = r.iterations;
  return {std::move(r.profile), rep};
}

std::vector<std::pair<double, double>> pair_distance_density(const RadialProfile& p,
                                                             const std::vector<double>& r_nodes) {
  if (r_nodes.empty()) throw std::invalid_argument("pair_distance_density: empty r_nodes");
  const int m = static_cast<int>(r_nodes.size());
  double width = (m > 1) ? (r_nodes[1] - r_nodes[0]) : (2.0 * r_nodes[0]);
  if (!(width > 0.0)) throw std::invalid_argument("pair_distance_density: nodes must increase");
  const double lo_edge = r_nodes[0] - 0.5 * width;
  auto bin_of = [&](double rho) { return static_cast<int>(std::floor((rho - lo_edge) / width)); };

  auto w = shell_weights(p);
  const int n = p.grid.n;
  std::vector<double> mass(m, 0.0);
  for (int i = 0; i < n; ++i) {
    if (w[i] == 0.0) continue;
    const double ri = p.grid.node(i);
    for (int j = i; j < n; ++j) {
      if (w[j] == 0.0) continue;
      const double rj = p.grid.node(j);
      const double pair_w = (i == j ? 1.0 : 2.0) * w[i] * w[j];
      const double lo = rj - ri, hi = rj + ri;
      const double inv = pair_w / (4.0 * ri * rj);
      int b0 = std::max(0, bin_of(lo));
      int b1 = std::min(m - 1, bin_of(hi));
      for (int b = b0; b <= b1; ++b) {
        double a = std::max(lo, lo_edge + b * width);
        double c = std::min(hi, lo_edge + (b + 1) * width);
        if (c > a) mass[b] += inv * (c * c - a * a);
      }
    }
  }
  std::vector<std::pair<double, double>> out(m);
  for (int b = 0; b < m; ++b) out[b] = {r_nodes[b], mass[b] / width};
  return out;
}

double u_band_constant(const RadialProfile& p, double a_lo, double b_hi, int n_bins) {
  if (!(a_lo >= 0.0 && b_hi >= a_lo)) throw std::invalid_argument("u_band_constant: need 0 <= A <= B");
  if (b_hi == a_lo) return 0.0;  // empty band
  const double rho_max = 2.0 * p.grid.r_max;
  const double d = rho_max / n_bins;
  std::vector<double> nodes(n_bins);
  for (int b = 0; b < n_bins; ++b) nodes[b] = (b + 0.5) * d;
  auto density = pair_distance_density(p, nodes);
  double s = 0.0;
  for (const auto& [rho, f] : density) {
    double h;
    if (rho < 1e-9) {
      h = kSqrt2OverPi * (b_hi - a_lo);
    } else {
      h = (std::erf(b_hi * rho / kSqrt2) - std::erf(a_lo * rho / kSqrt2)) / rho;
    }
    s += f * h * d;
  }
  return s;
}

double pair_expectation(const RadialProfile& p, const std::function<double(double)>& v) {
  auto w = shell_weights(p);
  const int n = p.grid.n;
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    if (w[i] == 0.0) continue;
    const double ri = p.grid.node(i);
    for (int j = i; j < n; ++j) {
      if (w[j] == 0.0) continue;
      const double rj = p.grid.node(j);
      const double pw = (i == j ? 1.0 : 2.0) * w[i] * w[j];
      // 16-point trapezoid-free Simpson over the angular average.
      const double lo = rj - ri, hi = rj + ri;
      const int q = 16;
      double h = (hi - lo) / q;
      double acc = 0.0;
      for (int t = 0; t <= q; ++t) {
        double rho = lo + t * h;
        double coef = (t == 0 || t == q) ? 1.0 : (t % 2 == 1 ? 4.0 : 2.0);
        acc += coef * rho * v(rho);
      }
      acc *= h / 3.0;
      s += pw * acc / (4.0 * ri * rj);
    }
  }
  return s;
}

double perturbed_energy(const std::function<double(double)>& v_spec, double eta,
                        const RadialGrid& grid, double tol, int max_iter,
                        const PekarOptions& opts) {
  grid.validate();
  if (std::fabs(eta) > 0.1) throw std::invalid_argument("perturbed_energy: |eta| must be <= 0.1");

  const int n = grid.n;
  std::vector<double> kernel;
  if (eta != 0.0) {
    kernel.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
      const double ri = grid.node(i);
      for (int j = i; j < n; ++j) {
        const double rj = grid.node(j);
        const double lo = rj - ri, hi = rj + ri;
        const int q = 8;
        double h = (hi - lo) / q;
        double acc = 0.0;
        for (int t = 0; t <= q; ++t) {
          double rho = lo + t * h;
          double coef = (t == 0 || t == q) ? 1.0 : (t % 2 == 1 ? 4.0 : 2.0);
          acc += coef * rho * v_spec(rho);
        }
        acc *= h / 3.0;
        double val = eta * acc / (4.0 * ri * rj);
        kernel[static_cast<std::size_t>(i) * n + j] = val;
        kernel[static_cast<std::size_t>(j) * n + i] = val;
      }
    }
  }

  // Warm start from the unperturbed solution keeps the eta-family on the same
  // branch of maximizers.
  ScfContext base{grid, nullptr};
  ScfResult s0 = run_scf(base, tol, max_iter, opts, nullptr);
  ScfContext ctx{grid, eta != 0.0 ? &kernel : nullptr};
  ScfResult s = run_scf(ctx, tol, max_iter, opts, &s0.profile);
  return ctx.pair_energy(s.profile) - kinetic_energy(s.profile);
}

}  // namespace polaron
