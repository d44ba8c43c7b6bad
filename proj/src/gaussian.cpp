#include "edgeworth/gaussian.hpp"

#include <cmath>
#include <numbers>

namespace edgeworth {
namespace {

constexpr double kInvSqrtPi = 0.56418958354775628695;  // 1 / sqrt(pi)

// exp(-x^2) with x^2 split so the leading product is exact.
double exp_neg_square(double x) {
  const double hi = std::ldexp(std::trunc(std::ldexp(x, 20)), -20);
  const double lo = x - hi;
  return std::exp(-hi * hi) * std::exp(-lo * (x + hi));
}

// erf(x) = 2/sqrt(pi) exp(-x^2) sum_n 2^n x^(2n+1) / (1 * 3 * ... * (2n+1)), all terms positive.
double erf_series(double x) {
  const double x2 = x * x;
  double term = x;
  double sum = x;
  for (int n = 1; n < 200; ++n) {
    term *= 2.0 * x2 / (2 * n + 1);
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
  }
  return 2.0 * kInvSqrtPi * exp_neg_square(x) * sum;
}

// erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))), x >= 0.75,
// evaluated bottom-up from a depth past convergence.
double erfc_fraction(double x) {
  const int depth = 20 + static_cast<int>(600.0 / (x * x));
  double tail = 0.0;
  for (int n = depth; n >= 1; --n) tail = (0.5 * n) / (x + tail);
  return kInvSqrtPi * exp_neg_square(x) / (x + tail);
}

}  // namespace

double erfc_pinned(double x) {
  if (std::isnan(x)) return x;
  if (std::abs(x) < 0.75) return 1.0 - erf_series(x);
  if (x > 27.3) return 0.0;
  if (x < -6.0) return 2.0;
  if (x > 0.0) return erfc_fraction(x);
  return 2.0 - erfc_fraction(-x);
}

double normal_cdf(double z) { return 0.5 * erfc_pinned(-z * std::numbers::sqrt2 * 0.5); }

double normal_cdf(double x, double sigma2) { return normal_cdf(x / std::sqrt(sigma2)); }

double normal_sf(double x, double sigma2) { return normal_cdf(-x / std::sqrt(sigma2)); }

double normal_pdf(double x, double sigma2) {
  return std::exp(-0.5 * x * x / sigma2) / std::sqrt(2.0 * std::numbers::pi * sigma2);
}

}  // namespace edgeworth
