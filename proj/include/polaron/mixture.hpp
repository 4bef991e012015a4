#pragma once

#include <string>

#include "polaron/rng.hpp"

// Gaussian-mixture potential specifications. Each kind fixes a u-marginal
// measure gamma~(du) with V(x) = sqrt(2/pi) int exp(-u^2 x^2 / 2) gamma~(du);
// the full interval intensity is coupling * sqrt(2/pi) e^{-(t-s)}
// exp(-u^2 z^2/2) gamma~(du) with z the path displacement. Closed forms:
//   coulomb          gamma~ = du on (0, inf),        G(z) = sqrt(pi/2)/z
//   truncated(cap)   gamma~ = 1_{u <= cap} du,       G(z) = sqrt(pi/2) erf(cap z / sqrt2)/z
//   band(a, b)       gamma~ = 1_{a <= u <= b} du,    G(z) = sqrt(pi/2)(erf(bz/sqrt2)-erf(az/sqrt2))/z
//   power(p)         gamma~ = A_p u^{p-1} du,        G(z) = z^{-p},  A_p = 2^{1-p/2}/Gamma(p/2)
// where G(z) = int exp(-u^2 z^2/2) gamma~(du).

namespace polaron {

enum class MixtureKind { coulomb, truncated, band, power };

struct MixtureSpec {
  MixtureKind kind = MixtureKind::coulomb;
  double coupling = 0.0;  // alpha (or C1 alpha)
  double cap = 0.0;       // truncated
  double band_lo = 0.0;   // band
  double band_hi = 0.0;   // band
  double p = 1.0;         // power, 0 < p < 2
  double t_lo = 0.0;      // window the spec is tied to
  double t_hi = 0.0;

  static MixtureSpec coulomb_spec(double coupling, double t_lo, double t_hi);
  static MixtureSpec truncated_spec(double coupling, double cap, double t_lo, double t_hi);
  static MixtureSpec band_spec(double coupling, double a, double b, double t_lo, double t_hi);
  static MixtureSpec power_spec(double coupling, double p, double t_lo, double t_hi);

  void validate() const;
  std::string describe() const;

  // G(z) = int exp(-u^2 z^2 / 2) gamma~(du); finite for z > 0.
  double g_total(double z) const;
  // Tail mass int_{u >= c} exp(-u^2 z^2 / 2) gamma~(du).
  double g_tail(double z, double c) const;
  // Draw u from the density proportional to exp(-u^2 z^2/2) gamma~(du).
  double sample_u(double z, Rng& rng) const;
};

}  // namespace polaron
