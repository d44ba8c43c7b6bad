#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "edgeworth/jets.hpp"
#include "edgeworth/models.hpp"

namespace edgeworth {

/// Taylor data of t -> L_t, stored as one d x d matrix per power of t:
/// L_t = sum_m coeff[m] t^m with coeff[m]_{jk} = p_{jk} (i h_{jk})^m / m!.
struct OperatorFamilyJet {
  std::vector<Eigen::MatrixXcd> coeff;
  Eigen::VectorXd ell;  // functional applied on the left (mu0)
  Eigen::VectorXd v;    // vector applied on the right (all ones)

  int dim() const { return static_cast<int>(coeff.front().rows()); }
  int order() const { return static_cast<int>(coeff.size()) - 1; }
  Jet entry(int j, int k) const;
  /// Row-stochastic real part at t = 0.
  Eigen::MatrixXd base() const { return coeff.front().real(); }
};

/// Throws InvalidConfig when order < 2.
OperatorFamilyJet build_operator_family(const MarkovModel& model, int order);
/// 1 x 1 family whose entry is sum_k m_k (i t)^k / k!; throws InsufficientMoments
/// when fewer than `order` moments are available.
OperatorFamilyJet build_operator_family(const IidModel& model, int order);

struct PerronBase {
  Complex mu0 = 1.0;
  Eigen::VectorXd right;
  Eigen::VectorXd left;  // stationary distribution pi
  double gap = 1.0;
};

/// Throws SingularStationarySolve, GapBelowTolerance (gap < 1e-8).
PerronBase perron_base(const Eigen::MatrixXd& P);

/// Normalization of the perturbed right eigenvector.
enum class Gauge {
  Stationary,  // pi . v^(m) = 0 for m >= 1
  Uniform,     // 1 . v^(m) = 0 for m >= 1
};

struct SpectralJets {
  Jet mu;
  Jet z;
  std::vector<Eigen::VectorXcd> right;  // v_t coefficients, right[m] = v^(m)
  std::vector<Eigen::VectorXcd> left;   // l_t coefficients, normalized by l_t(v_t) = 1

  Jet right_entry(int j) const;
  Jet left_entry(int j) const;
};

/// Order-by-order solution of L_t v_t = mu(t) v_t through a bordered system
/// factored once. Throws BorderedSolveSingular.
SpectralJets eigen_perturbation(const OperatorFamilyJet& fam, const PerronBase& base,
                                Gauge gauge = Gauge::Stationary);

/// max over m of the norm of the t^m coefficient of L_t v_t - mu(t) v_t.
double eigen_residual(const OperatorFamilyJet& fam, const SpectralJets& s);

/// The concrete matrix L_t.
Eigen::MatrixXcd operator_at(const MarkovModel& model, double t);

/// mu0^T L_t^N 1 by N matrix-vector products.
Complex char_fn(const MarkovModel& model, double t, long long N);

struct PowerIteration {
  Complex eigenvalue;
  double radius = 0.0;
};

/// 200 iterations (or until the growth ratio settles to 1e-10) from the start
/// vector (1, 1/2, 1/3, ...). radius is the averaged log-growth estimate.
PowerIteration power_iteration(const Eigen::MatrixXcd& A, int iterations = 200, double tol = 1e-10);

struct NormDecayRow {
  double t = 0.0;
  double norm = 0.0;    // ||L_t^N||_inf
  double radius = 0.0;  // spectral radius estimate of L_t
};

std::vector<NormDecayRow> norm_decay_scan(const MarkovModel& model, const std::vector<double>& t_grid, int N);

}  // namespace edgeworth
