#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "edgeworth/models.hpp"

namespace edgeworth {

/// Law of S_N with finitely many atoms.
struct ExactDistribution {
  enum class Kind { Lattice, Enumerated, Empirical };

  Kind kind = Kind::Lattice;
  std::vector<double> support;  // strictly increasing
  std::vector<double> pmf;
  std::vector<double> cdf;      // compensated running sums of pmf
  long long N = 0;
  /// Sampler identifier for empirical laws, empty otherwise.
  std::string algorithm;

  /// P(S <= x).
  double cdf_at(double x) const;
  /// P(S < x).
  double cdf_before(double x) const;
  /// E f(S).
  double expectation(const std::function<double(double)>& f) const;
  /// Law of (S - center) / scale.
  ExactDistribution standardized(double center, double scale) const;
  double total_mass() const;

  /// Rows "value,pmf,cdf" with 17 significant digits.
  void write_csv(std::ostream& out) const;
};

/// Exact pmf of S_N over (state, integer lattice index); throws TableTooLarge
/// above 1e7 cells and InvalidConfig when the model is not lattice.
ExactDistribution dp_pmf(const MarkovModel& model, int N);

/// Exact law of S_N with sums merged within merge_tol. Throws TooManyValues when
/// the count of distinct sums (C(N + u - 1, u - 1) for u distinct increments)
/// can exceed 1e6.
ExactDistribution enum_distribution(const MarkovModel& model, int N, double merge_tol = 1e-9);

/// E[(S_N - N center)^k] for k = 0..kmax by propagating jet-valued row vectors.
std::vector<double> exact_moments(const MarkovModel& model, int N, int kmax, double center);

/// Chain trajectories. Trials are split into fixed chunks, chunk c drawing
/// from an mt19937_64 stream seeded by splitmix64(seed, c), so the result does
/// not depend on the worker count.
ExactDistribution mc_sample(const MarkovModel& model, int N, long long trials, std::uint64_t seed, int threads = 0);

/// Map orbits from Lebesgue-distributed starts; S_N = sum_{n<N} g(f^n x).
/// The doubling map is simulated exactly on the binary expansion of x.
ExactDistribution mc_sample(const UlamSpec& spec, int N, long long trials, std::uint64_t seed, int threads = 0);

/// A CDF with optional atoms, where left limits can differ from values.
struct CdfQuery {
  std::function<double(double)> F;
  std::function<double(double)> F_left;
  std::vector<double> atoms;
};

CdfQuery as_query(const ExactDistribution& dist);
CdfQuery continuous_query(std::function<double(double)> F);

/// sup |F_a - F_b| over the probes and every atom of either side, using both
/// one-sided values at atoms.
double kolmogorov_distance(const CdfQuery& a, const CdfQuery& b, std::span<const double> probes);

/// Uniform grid of `count` points on [lo, hi].
std::vector<double> linear_grid(double lo, double hi, int count);

}  // namespace edgeworth
