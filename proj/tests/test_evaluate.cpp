#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "edgeworth/error.hpp"
#include "edgeworth/evaluate.hpp"
#include "edgeworth/gaussian.hpp"

using namespace edgeworth;

namespace {

MarkovModel two_state() {
  Eigen::MatrixXd P(2, 2), h(2, 2);
  P << 0.7, 0.3, 0.4, 0.6;
  h << 1, 0, 0, 0;
  Eigen::VectorXd mu0(2);
  mu0 << 0.5, 0.5;
  return markov_model(P, h, mu0);
}

ExpansionSet gaussian_law(int r) {
  // Moments of N(0, 2): every correction vanishes.
  return expand(iid_from_moments({0.0, 2.0, 0.0, 12.0, 0.0, 120.0, 0.0, 1680.0, 0.0, 30240.0, 0.0}), r);
}

}  // namespace

TEST(Simpson, IntegratesSmoothFunctions) {
  EXPECT_NEAR(simpson([](double x) { return std::exp(-x * x / 2); }, -20, 20), std::sqrt(2 * std::numbers::pi),
              1e-10);
  EXPECT_NEAR(simpson([](double x) { return x * x * x; }, 0, 2), 4.0, 1e-13);
  try {
    (void)simpson([](double x) { return x < 0.3 ? 0.0 : 1.0; }, 0, 1, 1e-300);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::QuadratureNotConverged);
  }
}

TEST(TestFunctions, IntegralsAndFourier) {
  for (const TestFunction& f :
       {TestFunction::gaussian_bump(0.3, 1.5), TestFunction::compact_bump(-0.2, 0.8), TestFunction::hermite_damped(2)}) {
    EXPECT_NEAR(simpson(f, f.support_lo(), f.support_hi(), 1e-13), f.integral(), 1e-9) << f.name();
  }
  const TestFunction g = TestFunction::hermite_damped(3, 0.5, 1.2);
  const double t = 0.7;
  const double re = simpson([&](double x) { return g(x) * std::cos(t * x); }, g.support_lo(), g.support_hi(), 1e-13);
  const double im = simpson([&](double x) { return -g(x) * std::sin(t * x); }, g.support_lo(), g.support_hi(), 1e-13);
  EXPECT_LE(std::abs(*g.fourier(t) - Complex(re, im)), 1e-9);
  EXPECT_FALSE(TestFunction::compact_bump().fourier(1.0));
}

TEST(Edgeworth, CdfLimitsAndCenter) {
  const ExpansionSet e = expand(two_state(), 3);
  EXPECT_NEAR(edgeworth_cdf(e, 100, -50.0), 0.0, 1e-15);
  EXPECT_NEAR(edgeworth_cdf(e, 100, 50.0), 1.0, 1e-15);
  const double z = 0.37;
  double ref = normal_cdf(z, e.params.sigma2);
  for (int p = 1; p <= 3; ++p) ref += e.edge_p[p].eval(z) * std::pow(100.0, -p / 2.0) * normal_pdf(z, e.params.sigma2);
  EXPECT_NEAR(edgeworth_cdf(e, 100, z), ref, 1e-15);
}

TEST(Edgeworth, GaussianLawHasNoCorrections) {
  const ExpansionSet e = gaussian_law(4);
  for (int p = 1; p <= 4; ++p) EXPECT_LE(e.edge_p[p].max_abs_diff(Polynomial()), 1e-11) << p;
  for (double z : {-2.0, 0.0, 1.3}) EXPECT_NEAR(edgeworth_cdf(e, 50, z), normal_cdf(z, 2.0), 1e-11);
}

TEST(Lattice, PmfSumsToOne) {
  const MarkovModel m = two_state();
  const ExpansionSet e = expand(m, 2);
  const long long N = 400;
  double total = 0.0;
  for (int k = 0; k <= N; ++k) total += lattice_pmf(e, N, k);
  EXPECT_NEAR(total, 1.0, 1e-6);
}

TEST(WeakLocal, LeadingTermIsGaussianMass) {
  const ExpansionSet e = expand(two_state(), 0);
  const TestFunction f = TestFunction::gaussian_bump(0.0, 2.0);
  const double ref = f.integral() / std::sqrt(2 * std::numbers::pi * e.params.sigma2);
  EXPECT_NEAR(weak_local(e, f, 1000), ref, 1e-12);
}

TEST(WeakGlobal, MatchesOracleAtLargeN) {
  const MarkovModel m = two_state();
  const ExpansionSet e = expand(m, 2);
  const TestFunction f = TestFunction::gaussian_bump(0.0, 3.0);
  const long long N = 256;
  const ExactDistribution d = dp_pmf(m, N);
  const double exact = d.expectation([&](double x) { return f(x - N * e.params.A); });
  EXPECT_NEAR(weak_global(e, f, N), exact, 2e-3);
}

TEST(Averaged, ExpansionTracksExactDifference) {
  const MarkovModel m = two_state();
  const ExpansionSet e = expand(m, 2);
  const TestFunction f = TestFunction::gaussian_bump(0.0, 1.0);
  const long long N = 1024;
  const ExactDistribution d = dp_pmf(m, N);
  for (double x : averaged_probes(e)) {
    const double exact = averaged_exact(e, d, f, x);
    EXPECT_NEAR(averaged(e, f, N, x), exact, 2e-3 * std::abs(exact) + 1e-4) << x;
  }
}

TEST(Lclt, EstimateAndWindow) {
  const ExpansionSet e = expand(two_state(), 1);
  const double s2 = e.params.sigma2;
  EXPECT_NEAR(lclt_estimate(e, 0.0, 100), 1.0 / std::sqrt(2 * std::numbers::pi * s2), 1e-15);
  EXPECT_NEAR(lclt_estimate(e, 10.0, 100), std::exp(-100.0 / (200 * s2)) / std::sqrt(2 * std::numbers::pi * s2), 1e-15);
  EXPECT_NEAR(lclt_window(e, 0.0, 100, 0.5), 0.1 / std::sqrt(2 * std::numbers::pi * s2), 1e-15);
}

TEST(ModerateDeviations, PredictionAndRatio) {
  EXPECT_NEAR(moddev_tail_prediction(0.5, 4096),
              1.0 / std::sqrt(std::numbers::pi) / std::sqrt(64.0 * std::log(4096.0)), 1e-15);
  const MarkovModel m = two_state();
  const ExpansionSet e = expand(m, 1);
  const ModDevResult r = moddev_ratio(e, m, 0.5, 4096);
  EXPECT_NEAR(r.x, std::sqrt(0.5 * e.params.sigma2 * std::log(4096.0)), 1e-14);
  EXPECT_GT(r.ratio, 0.8);
  EXPECT_LT(r.ratio, 1.2);
  try {
    (void)moddev_ratio(e, m, 1.5, 64);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::InvalidConfig);
  }
}

// (P_p n)' = R_p n, checked by central differences.
TEST(Identity, DensityIsDerivativeOfCdfExpansion) {
  const ExpansionSet e = expand(two_state(), 4);
  const double s2 = e.params.sigma2;
  for (double z : {-1.5, -0.2, 0.9}) {
    const double h = 1e-5;
    for (int p = 1; p <= 4; ++p) {
      auto g = [&](double y) { return e.edge_p[p].eval(y) * normal_pdf(y, s2); };
      const double fd = (g(z + h) - g(z - h)) / (2 * h);
      EXPECT_NEAR(fd, e.edge_r[p].eval(z) * normal_pdf(z, s2), 1e-8) << p;
    }
  }
}

TEST(Convergence, ReportFlags) {
  const MarkovModel m = two_state();
  const ExpansionSet e = expand(m, 1);
  const ConvergenceReport rep = convergence_study(e, m, OracleKind::Lattice, {64, 256, 1024});
  EXPECT_EQ(rep.raw_error.size(), 3u);
  EXPECT_TRUE(rep.monotone);
  EXPECT_TRUE(rep.endpoint);
  EXPECT_LT(rep.fitted_slope, -0.9);
  EXPECT_EQ(oracle_kind_name(rep.kind), "lattice");
}
