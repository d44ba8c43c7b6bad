#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "edgeworth/expansion.hpp"
#include "edgeworth/models.hpp"
#include "edgeworth/oracle.hpp"

namespace edgeworth {

struct TestFunction {
  enum class Kind { GaussianBump, CompactBump, HermiteDamped };

  Kind kind = Kind::GaussianBump;
  double center = 0.0;
  double width = 1.0;
  int degree = 0;  // HermiteDamped: He_degree((x - c)/w) exp(-(x - c)^2 / 2w^2)

  static TestFunction gaussian_bump(double center = 0.0, double width = 1.0);
  /// exp(-1 / (1 - ((x - c)/w)^2)) on |x - c| < w.
  static TestFunction compact_bump(double center = 0.0, double width = 1.0);
  static TestFunction hermite_damped(int degree, double center = 0.0, double width = 1.0);

  double operator()(double x) const;
  /// Interval outside which |f| < 1e-30.
  double support_lo() const;
  double support_hi() const;
  /// Integral over the real line.
  double integral() const;
  /// int f(x) exp(-i t x) dx when known in closed form.
  std::optional<Complex> fourier(double t) const;
  /// -1 stands for C-infinity.
  int smoothness() const { return -1; }
  std::string name() const;
};

/// Composite Simpson on [lo, hi], doubling the panel count until successive
/// estimates differ by at most tol or 2^20 points are used (QuadratureNotConverged).
double simpson(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-10);

/// Phi_sigma(z) + sum_{p=1}^r P_p(z) N^{-p/2} n(z).
double edgeworth_cdf(const ExpansionSet& exp, long long N, double z);

/// Approximation of P(S_N = x) at a lattice point x: span/sqrt(N) n(z) sum_p R_p(z) N^{-p/2},
/// z = (x - N A)/sqrt(N). Unit span when the expansion has no lattice data.
double lattice_pmf(const ExpansionSet& exp, long long N, double x);

/// sum_p N^{-p/2} int polys[p](z) n(z) f(z sqrt N) dz.
double weak_global_from(const std::vector<Polynomial>& polys, double sigma2, const TestFunction& f, long long N);
/// Approximation of E f(S_N - N A) using R_p.
double weak_global(const ExpansionSet& exp, const TestFunction& f, long long N);
/// Approximation of sqrt(N) E f(S_N - N A): (1/2pi) sum_p N^{-p} int P_{p,l} f.
double weak_local(const ExpansionSet& exp, const TestFunction& f, long long N);
/// sum_{p>=1} N^{-p/2} int P_p(x + y/sqrt N) n(x + y/sqrt N) f(y) dy.
double averaged(const ExpansionSet& exp, const TestFunction& f, long long N, double x);
/// Exact left side of the averaged expansion from an oracle law of S_N:
/// int [F_N(x + y/sqrt N) - Phi_sigma(x + y/sqrt N)] f(y) dy.
double averaged_exact(const ExpansionSet& exp, const ExactDistribution& dist, const TestFunction& f, double x);
/// Default averaged probe points {0, +-sigma, +-2 sigma}.
std::vector<double> averaged_probes(const ExpansionSet& exp);

/// (1/sqrt(2 pi sigma2)) exp(-u^2 / (2 N sigma2)).
double lclt_estimate(const ExpansionSet& exp, double u, long long N);
/// 2 eps lclt_estimate / sqrt(N).
double lclt_window(const ExpansionSet& exp, double u, long long N, double eps);

struct ModDevResult {
  double x = 0.0;
  double exact_tail = 0.0;
  double normal_tail = 0.0;
  double ratio = 0.0;
  /// (1/sqrt(2 pi c)) / sqrt(N^c ln N).
  double predicted_tail = 0.0;
};

double moddev_tail_prediction(double c, long long N);

/// x = max(1, sqrt(c sigma2 ln N)); ratio = P((S_N - NA)/sqrt N > x) / (1 - Phi_sigma(x)).
/// Uses dp_pmf for lattice models, enum_distribution otherwise (OracleUnavailable
/// when neither is feasible).
ModDevResult moddev_ratio(const ExpansionSet& exp, const MarkovModel& model, double c, long long N);

enum class OracleKind {
  Classical,  // Kolmogorov distance to the exact CDF (dp for lattice, enum otherwise)
  Lattice,    // sup_k sqrt(N) |P(S_N = k) - lattice_pmf|
  WeakLocal,  // |sqrt(N) E f(S_N - NA) - weak_local|
};

struct ConvergenceReport {
  int r = 0;
  OracleKind kind = OracleKind::Classical;
  std::vector<long long> N_list;
  std::vector<double> raw_error;
  std::vector<double> scaled_error;  // raw_error * N^{r/2}
  bool monotone = false;             // scaled strictly decreasing
  bool endpoint = false;             // last scaled below first
  double fitted_slope = 0.0;         // least-squares slope of log raw vs log N
};

std::string oracle_kind_name(OracleKind kind);

/// Exact law of S_N used by the studies: dp_pmf for lattice models, enum_distribution otherwise.
ExactDistribution exact_distribution(const MarkovModel& model, int N);

double classical_error(const ExpansionSet& exp, const ExactDistribution& dist);
double lattice_error(const ExpansionSet& exp, const ExactDistribution& dist);
double weak_local_error(const ExpansionSet& exp, const ExactDistribution& dist, const TestFunction& f);

ConvergenceReport convergence_study(const ExpansionSet& exp, const MarkovModel& model, OracleKind kind,
                                    const std::vector<long long>& N_list,
                                    const TestFunction& f = TestFunction::gaussian_bump(0.0, 2.0), int threads = 0);

}  // namespace edgeworth
