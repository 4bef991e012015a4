#include <initializer_list>
#include <cmath>

#include "doctest.h"

#include "polaron/special.hpp"

using namespace polaron;

TEST_CASE("erf_inv inverts erf across the range") {
  for (double x : {-3.0, -1.7, -0.5, -1e-6, 0.0, 1e-4, 0.3, 1.0, 2.5, 4.0}) {
    double y = std::erf(x);
    CHECK(erf_inv(y) == doctest::Approx(x).epsilon(1e-9));
  }
  CHECK_THROWS(erf_inv(1.5));
}

TEST_CASE("regularized incomplete gamma against known values") {
  // P(1, x) = 1 - e^{-x}
  CHECK(gamma_p(1.0, 2.0) == doctest::Approx(1.0 - std::exp(-2.0)).epsilon(1e-12));
  // chi-square(1) upper tail at 3.841458820694124 is 0.05
  CHECK(chi_square_sf(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-9));
  CHECK(chi_square_sf(18.307038053275146, 10) == doctest::Approx(0.05).epsilon(1e-9));
  CHECK(gamma_p(0.5, 0.0) == 0.0);
  CHECK(gamma_q(2.5, 0.0) == 1.0);
  CHECK(gamma_p(3.0, 50.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("kolmogorov distribution") {
  // Q(1.3581) ~ 0.05 (classic critical value)
  CHECK(kolmogorov_q(1.3581) == doctest::Approx(0.05).epsilon(2e-3));
  CHECK(kolmogorov_q(0.0) == 1.0);
  CHECK(kolmogorov_q(3.0) < 1e-7);
}

TEST_CASE("phi_tail is the scaled normal tail") {
  CHECK(phi_tail(0.0) == doctest::Approx(1.0));
  CHECK(phi_tail(1.0) == doctest::Approx(std::erfc(1.0 / kSqrt2)).epsilon(1e-15));
}
