#pragma once

// Special functions and goodness-of-fit distributions used across the lab.

namespace polaron {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSqrt2 = 1.41421356237309504880;
inline constexpr double kSqrt2OverPi = 0.79788456080286535588;  // sqrt(2/pi)
inline constexpr double kSqrtPiOver2 = 1.25331413731550025121;  // sqrt(pi/2)

// Inverse of erf on (-1,1). Newton-polished, ~1 ulp.
double erf_inv(double y);

// Scaled upper tail of the standard normal:
// phi_tail(z) = sqrt(2/pi) * int_z^inf exp(-u^2/2) du = erfc(z/sqrt(2)).
double phi_tail(double z);

// Regularized incomplete gamma functions P(a,x), Q(a,x) = 1 - P(a,x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Survival function of the chi-square distribution with k dof.
double chi_square_sf(double x, int dof);

// Asymptotic Kolmogorov distribution tail Q(lambda) = 2 sum (-1)^{k-1} e^{-2k^2 lambda^2};
// p-value for a one-sample KS statistic d with n samples is ks_pvalue(d, n).
double kolmogorov_q(double lambda);
double ks_pvalue(double d, double n_effective);

// log Gamma(x), x > 0 (Lanczos).
double log_gamma(double x);

}  // namespace polaron
