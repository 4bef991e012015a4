#pragma once

#include <cstdint>
#include <string>

// Seedable counter-based generator plus the exact variate transforms the lab
// relies on. All distributions are implemented here rather than through
// <random> so that a (seed, call sequence) pair maps to one stream of values
// on a given platform. The algorithm identifier below goes into run manifests.

namespace polaron {

inline constexpr const char* kRngAlgorithm = "splitmix64-v1";

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0,1) with 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0,1]; safe under log().
  double uniform_pos() { return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53; }

  double normal();                       // standard normal (Box-Muller, no cache)
  double exponential() ;                 // mean 1
  long long poisson(double mean);        // exact for any mean (chunked Knuth)
  double gamma(double shape);            // unit scale, Marsaglia-Tsang
  double half_normal_truncated(double lo, double hi);  // density ~ e^{-u^2/2} on [lo,hi]

  // Derives an independent stream for a sub-task; mixing is one-way so
  // sibling streams never collide for distinct tags.
  Rng fork(std::uint64_t tag) const;

 private:
  std::uint64_t state_;
};

}  // namespace polaron
