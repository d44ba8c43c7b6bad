#pragma once

namespace edgeworth {

/// Complementary error function computed in-repo (series near 0, Lentz
/// continued fraction in the tails) so results do not depend on libm.
double erfc_pinned(double x);

/// Standard normal CDF.
double normal_cdf(double z);
/// CDF of N(0, sigma2).
double normal_cdf(double x, double sigma2);
/// Upper tail 1 - CDF of N(0, sigma2), accurate far into the tail.
double normal_sf(double x, double sigma2);
/// Density of N(0, sigma2).
double normal_pdf(double x, double sigma2);

}  // namespace edgeworth
