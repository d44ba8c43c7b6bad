#include <cmath>

#include <gtest/gtest.h>

#include "edgeworth/error.hpp"
#include "edgeworth/spectral.hpp"

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

MarkovModel three_state() {
  Eigen::MatrixXd P(3, 3), h(3, 3);
  P << 0.6, 0.3, 0.1, 0.1, 0.7, 0.2, 0.25, 0.1, 0.65;
  h << 2, 0, 1, 1, -1, 0, 0, 1, 3;
  Eigen::VectorXd mu0(3);
  mu0 << 1, 0, 0;
  return markov_model(P, h, mu0);
}

SpectralJets jets_of(const MarkovModel& m, int order, Gauge g = Gauge::Stationary) {
  return eigen_perturbation(build_operator_family(m, order), perron_base(m.P), g);
}

}  // namespace

TEST(Perron, TwoStateStationaryLaw) {
  const PerronBase b = perron_base(two_state().P);
  EXPECT_NEAR(b.left(0), 4.0 / 7.0, 1e-15);
  EXPECT_NEAR(b.left(1), 3.0 / 7.0, 1e-15);
  EXPECT_NEAR(b.mu0.real(), 1.0, 1e-15);
  // second eigenvalue 0.3
  EXPECT_NEAR(b.gap, 0.7, 1e-9);
}

TEST(Perron, ReducibleChainRaises) {
  try {
    (void)perron_base(Eigen::MatrixXd::Identity(2, 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularStationarySolve);
  }
}

TEST(OperatorFamily, EntriesAreScaledExponentials) {
  const OperatorFamilyJet fam = build_operator_family(two_state(), 6);
  EXPECT_EQ(fam.order(), 6);
  const Jet e00 = fam.entry(0, 0);
  const Jet ref = jet_exp_i(1.0, 0.7, 6);
  for (int m = 0; m <= 6; ++m) EXPECT_LE(std::abs(e00[m] - ref[m]), 1e-16);
  const Jet e01 = fam.entry(0, 1);
  EXPECT_EQ(e01[0], Complex(0.3));
  for (int m = 1; m <= 6; ++m) EXPECT_EQ(e01[m], Complex(0.0));
}

TEST(EigenJets, DerivativesMatchFiniteDifferences) {
  const MarkovModel m = two_state();
  const SpectralJets s = jets_of(m, 6);
  const double h = 1e-4;
  auto mu = [&](double t) { return power_iteration(operator_at(m, t)).eigenvalue; };
  const Complex fd1 = (mu(h) - mu(-h)) / (2 * h);
  const Complex fd2 = (mu(h) - 2.0 * mu(0.0) + mu(-h)) / (h * h);
  const Complex d1 = s.mu.derivative_at_zero(1), d2 = s.mu.derivative_at_zero(2);
  EXPECT_LE(std::abs(fd1 - d1) / std::abs(d1), 1e-6);
  EXPECT_LE(std::abs(fd2 - d2) / std::abs(d2), 1e-6);
  // A = pi_0 * 0.7 = 0.4
  EXPECT_NEAR(d1.imag(), 0.4, 1e-14);
}

TEST(EigenJets, IidChainRecoversCharacteristicFunction) {
  const IidModel law = iid_from_pmf({{0.0, 0.6}, {1.0, 0.3}, {3.0, 0.1}}, 8);
  const SpectralJets chain = jets_of(iid_embedding(law), 8);
  const OperatorFamilyJet fam = build_operator_family(law, 8);
  const SpectralJets scalar = eigen_perturbation(fam, perron_base(fam.base()));
  for (int m = 0; m <= 8; ++m) {
    Complex phi_m = m == 0 ? 1.0 : std::pow(Complex(0, 1), m) * law.moments[m - 1] / std::tgamma(m + 1.0);
    EXPECT_LE(std::abs(chain.mu[m] - phi_m), 1e-12 * (1.0 + std::abs(phi_m))) << m;
    EXPECT_LE(std::abs(scalar.mu[m] - phi_m), 1e-13 * (1.0 + std::abs(phi_m))) << m;
  }
}

TEST(EigenJets, GaugeDoesNotChangeMuOrZ) {
  const MarkovModel m = three_state();
  const SpectralJets a = jets_of(m, 8, Gauge::Stationary);
  const SpectralJets b = jets_of(m, 8, Gauge::Uniform);
  for (int k = 0; k <= 8; ++k) {
    EXPECT_LE(std::abs(a.mu[k] - b.mu[k]), 1e-9);
    EXPECT_LE(std::abs(a.z[k] - b.z[k]), 1e-9);
  }
}

TEST(EigenJets, ResidualIsSmall) {
  for (const MarkovModel& m : {two_state(), three_state()}) {
    const OperatorFamilyJet fam = build_operator_family(m, 9);
    const SpectralJets s = eigen_perturbation(fam, perron_base(m.P));
    EXPECT_LE(eigen_residual(fam, s), 1e-9);
  }
}

// E exp(itS_N) = mu(t)^N Z(t) + O(|lambda_2|^N); at small t the jets reproduce it.
TEST(EigenJets, CharFnMatchesLeadingTerm) {
  const MarkovModel m = three_state();
  const SpectralJets s = jets_of(m, 12);
  const double t = 0.05;
  const long long N = 60;
  const Complex approx = std::pow(s.mu.eval(t), static_cast<double>(N)) * s.z.eval(t);
  EXPECT_LE(std::abs(char_fn(m, t, N) - approx), 1e-10);
  EXPECT_LE(std::abs(char_fn(m, 0.0, N) - 1.0), 1e-13);
}

TEST(PowerIteration, FindsDominantEigenvalue) {
  Eigen::MatrixXcd A(2, 2);
  A << 2.0, 1.0, 0.0, 0.5;
  const PowerIteration p = power_iteration(A);
  EXPECT_NEAR(p.eigenvalue.real(), 2.0, 1e-10);
  EXPECT_NEAR(p.radius, 2.0, 1e-6);
}

TEST(NormDecay, IntegerChainResonatesAtTwoPi) {
  const MarkovModel m = two_state();
  const auto rows = norm_decay_scan(m, {1.0, 2 * M_PI}, 4);
  EXPECT_LT(rows[0].radius, 1.0 - 1e-6);
  EXPECT_NEAR(rows[1].radius, 1.0, 1e-9);
  EXPECT_NEAR(rows[1].norm, 1.0, 1e-12);
}
