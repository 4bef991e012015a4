#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

// Radial solver for the strong-coupling variational problem
//   g0 = sup_{|psi|_2 = 1} [ iint psi^2(x) psi^2(y) / |x-y| dx dy - 1/2 |grad psi|_2^2 ]
// on a uniform grid in r, plus every psi0-derived constant the other modules
// consume as statistical targets.

namespace polaron {

struct RadialGrid {
  double r_max = 12.0;
  int n = 2000;

  double dr() const { return r_max / n; }
  double node(int k) const { return (k + 1) * dr(); }  // nodes (0, r_max], uniform
  void validate() const;
};

struct RadialProfile {
  RadialGrid grid;
  std::vector<double> values;  // psi(r_k), nonnegative
  double l2_norm = 0.0;        // sqrt(4 pi sum r^2 psi^2 dr), 1 after normalization

  void normalize();
  double norm() const;
};

struct PekarReport {
  double g0 = 0.0;
  double kinetic = 0.0;
  double coulomb = 0.0;
  double virial_ratio = 0.0;  // coulomb / (2 kinetic)
  double residual = 0.0;      // Euler-Lagrange stationarity residual
  int iterations = 0;
};

class SolveFailure : public std::runtime_error {
 public:
  SolveFailure(const std::string& what, double residual)
      : std::runtime_error(what), residual(residual) {}
  double residual;
};

struct PekarOptions {
  double damping = 0.5;  // mixing factor on psi updates
  int inverse_iterations = 4;
};

std::pair<RadialProfile, PekarReport> solve_pekar(const RadialGrid& grid, double tol,
                                                  int max_iter,
                                                  const PekarOptions& opts = {});

// One damped fixed-point update of the unperturbed functional (the body of
// the solver loop); the result is always normalized.
RadialProfile pekar_iterate_once(const RadialProfile& profile, const PekarOptions& opts = {});

// Double Coulomb integral iint psi^2(x) psi^2(y)/|x-y| via Newton's shell
// theorem; O(n) cumulative sums, equal to the direct double-sum quadrature.
double coulomb_double_integral(const RadialProfile& profile);

// 1/2 int |grad psi|^2 with forward differences; the r^2 weight is taken at
// the midpoint of each difference stencil and psi(r_max + dr) = 0.
double kinetic_energy(const RadialProfile& profile);

// Shell potential Phi(r_k) = int psi^2(y)/|x-y| dy; helper shared with the
// solver and exposed for tests.
std::vector<double> hartree_potential(const RadialProfile& profile);

// Density of |x - y| under psi^2 (x) psi^2 (y) dx dy, reported at the given
// bin centers (uniform spacing). Bin masses are exact per shell pair, so the
// density integrates to the total mass captured by the bins.
std::vector<std::pair<double, double>> pair_distance_density(const RadialProfile& profile,
                                                             const std::vector<double>& r_nodes);

// g~0(A,B) = sqrt(2/pi) int_A^B dz iint psi^2 psi^2 exp(-z^2 |x-y|^2 / 2),
// evaluated by quadrature over the pair-distance density.
double u_band_constant(const RadialProfile& profile, double a_lo, double b_hi,
                       int n_bins = 8192);

// Perturbed functional with kernel 1/w + eta V(w); same fixed-point machinery.
double perturbed_energy(const std::function<double(double)>& v_spec, double eta,
                        const RadialGrid& grid, double tol, int max_iter = 400,
                        const PekarOptions& opts = {});

// Expectation iint psi^2(x) psi^2(y) V(|x-y|) at the given profile.
double pair_expectation(const RadialProfile& profile, const std::function<double(double)>& v);

}  // namespace polaron
