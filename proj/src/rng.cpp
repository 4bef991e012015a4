#include "polaron/rng.hpp"

#include <cmath>
#include <stdexcept>

#include "polaron/special.hpp"

namespace polaron {

double Rng::normal() {
  double u1 = uniform_pos();
  double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

double Rng::exponential() { return -std::log(uniform_pos()); }

long long Rng::poisson(double mean) {
  if (!(mean >= 0.0)) throw std::invalid_argument("poisson: negative mean");
  long long total = 0;
  // Chunk large means; Poisson additivity keeps the draw exact.
  while (mean > 32.0) {
    double part = 16.0;
    double l = std::exp(-part);
    long long k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform_pos();
    } while (p > l);
    total += k - 1;
    mean -= part;
  }
  if (mean == 0.0) return total;
  // First-uniform early out: u <= 1-mean implies u <= e^{-mean}, so N = 0.
  double u = uniform_pos();
  if (u <= 1.0 - mean) return total;
  double l = std::exp(-mean);
  long long k = 1;
  double p = u;
  while (p > l) {
    ++k;
    p *= uniform_pos();
  }
  return total + k - 1;
}

double Rng::gamma(double shape) {
  if (!(shape > 0.0)) throw std::invalid_argument("gamma: shape must be positive");
  if (shape < 1.0) {
    double boost = std::pow(uniform_pos(), 1.0 / shape);
    return gamma(shape + 1.0) * boost;
  }
  double d = shape - 1.0 / 3.0;
  double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = normal();
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    double u = uniform_pos();
    if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v;
  }
}

double Rng::half_normal_truncated(double lo, double hi) {
  if (!(lo >= 0.0 && hi > lo)) throw std::invalid_argument("half_normal_truncated: need 0 <= lo < hi");
  double elo = std::erf(lo / kSqrt2);
  double ehi = std::erf(hi / kSqrt2);
  if (ehi - elo > 1e-13) {
    double v = uniform();
    return kSqrt2 * erf_inv(elo + v * (ehi - elo));
  }
  // Both endpoints deep in the tail: Robert's exponential-proposal tail
  // sampler for u >= lo, rejecting u > hi.
  double lam = 0.5 * (lo + std::sqrt(lo * lo + 4.0));
  for (int tries = 0; tries < 1000000; ++tries) {
    double x = lo + exponential() / lam;
    double rho = std::exp(-0.5 * (x - lam) * (x - lam));
    if (uniform() <= rho && x <= hi) return x;
  }
  throw std::runtime_error("half_normal_truncated: rejection loop exhausted");
}

Rng Rng::fork(std::uint64_t tag) const {
  // One round of splitmix on (state, tag) decorrelates the child stream.
  std::uint64_t z = state_ ^ (0x9e3779b97f4a7c15ULL * (tag + 0x632be59bd9b4e019ULL));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return Rng(z ^ (z >> 31));
}

}  // namespace polaron
