#include "polaron/mixture.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "polaron/special.hpp"

namespace polaron {

MixtureSpec MixtureSpec::coulomb_spec(double coupling, double t_lo, double t_hi) {
  MixtureSpec s;
  s.kind = MixtureKind::coulomb;
  s.coupling = coupling;
  s.t_lo = t_lo;
  s.t_hi = t_hi;
  s.validate();
  return s;
}

MixtureSpec MixtureSpec::truncated_spec(double coupling, double cap, double t_lo, double t_hi) {
  MixtureSpec s;
  s.kind = MixtureKind::truncated;
  s.coupling = coupling;
  s.cap = cap;
  s.t_lo = t_lo;
  s.t_hi = t_hi;
  s.validate();
  return s;
}

MixtureSpec MixtureSpec::band_spec(double coupling, double a, double b, double t_lo, double t_hi) {
  MixtureSpec s;
  s.kind = MixtureKind::band;
  s.coupling = coupling;
  s.band_lo = a;
  s.band_hi = b;
  s.t_lo = t_lo;
  s.t_hi = t_hi;
  s.validate();
  return s;
}

MixtureSpec MixtureSpec::power_spec(double coupling, double p, double t_lo, double t_hi) {
  MixtureSpec s;
  s.kind = MixtureKind::power;
  s.coupling = coupling;
  s.p = p;
  s.t_lo = t_lo;
  s.t_hi = t_hi;
  s.validate();
  return s;
}

void MixtureSpec::validate() const {
  if (!(coupling >= 0.0)) throw std::invalid_argument("MixtureSpec: coupling must be >= 0");
  if (!(t_hi > t_lo)) throw std::invalid_argument("MixtureSpec: empty window");
  switch (kind) {
    case MixtureKind::coulomb:
      break;
    case MixtureKind::truncated:
      if (!(cap > 0.0)) throw std::invalid_argument("MixtureSpec: truncated cap must be positive");
      break;
    case MixtureKind::band:
      if (!(band_lo >= 0.0 && band_hi > band_lo))
        throw std::invalid_argument("MixtureSpec: band needs 0 <= a < b");
      break;
    case MixtureKind::power:
      if (!(p > 0.0 && p < 2.0)) throw std::invalid_argument("MixtureSpec: power needs 0 < p < 2");
      break;
  }
}

std::string MixtureSpec::describe() const {
  std::ostringstream os;
  switch (kind) {
    case MixtureKind::coulomb:
      os << "coulomb";
      break;
    case MixtureKind::truncated:
      os << "truncated(cap=" << cap << ")";
      break;
    case MixtureKind::band:
      os << "band(" << band_lo << "," << band_hi << ")";
      break;
    case MixtureKind::power:
      os << "power(p=" << p << ")";
      break;
  }
  os << " coupling=" << coupling;
  return os.str();
}

namespace {
inline double a_p_constant(double p) { return std::exp((1.0 - 0.5 * p) * std::log(2.0) - log_gamma(0.5 * p)); }
}  // namespace

double MixtureSpec::g_total(double z) const {
  switch (kind) {
    case MixtureKind::coulomb:
      return kSqrtPiOver2 / z;
    case MixtureKind::truncated:
      return kSqrtPiOver2 * std::erf(cap * z / kSqrt2) / z;
    case MixtureKind::band:
      return kSqrtPiOver2 * (std::erf(band_hi * z / kSqrt2) - std::erf(band_lo * z / kSqrt2)) / z;
    case MixtureKind::power: {
      // A_p int u^{p-1} e^{-u^2 z^2/2} du over (0,inf) collapses to z^{-p}.
      return std::pow(z, -p);
    }
  }
  return 0.0;
}

double MixtureSpec::g_tail(double z, double c) const {
  if (c <= 0.0) return g_total(z);
  switch (kind) {
    case MixtureKind::coulomb:
      return kSqrtPiOver2 * std::erfc(c * z / kSqrt2) / z;
    case MixtureKind::truncated: {
      if (c >= cap) return 0.0;
      return kSqrtPiOver2 * (std::erf(cap * z / kSqrt2) - std::erf(c * z / kSqrt2)) / z;
    }
    case MixtureKind::band: {
      double lo = std::fmax(c, band_lo);
      if (lo >= band_hi) return 0.0;
      return kSqrtPiOver2 * (std::erf(band_hi * z / kSqrt2) - std::erf(lo * z / kSqrt2)) / z;
    }
    case MixtureKind::power: {
      // A_p int_c^inf u^{p-1} e^{-u^2 z^2/2} du = z^{-p} Q(p/2, c^2 z^2/2).
      return std::pow(z, -p) * gamma_q(0.5 * p, 0.5 * c * c * z * z);
    }
  }
  return 0.0;
}

double MixtureSpec::sample_u(double z, Rng& rng) const {
  switch (kind) {
    case MixtureKind::coulomb:
      return std::fabs(rng.normal()) / z;
    case MixtureKind::truncated:
      return rng.half_normal_truncated(0.0, cap * z) / z;
    case MixtureKind::band: {
      if (band_lo * z < 1e-8 && band_hi * z < 1e-8) {
        // Degenerate Gaussian factor: uniform on the band.
        return band_lo + rng.uniform() * (band_hi - band_lo);
      }
      return rng.half_normal_truncated(band_lo * z, band_hi * z) / z;
    }
    case MixtureKind::power: {
      // u^2 ~ Gamma(p/2, rate z^2/2).
      double w = rng.gamma(0.5 * p) * 2.0 / (z * z);
      return std::sqrt(w);
    }
  }
  return 0.0;
}

}  // namespace polaron
