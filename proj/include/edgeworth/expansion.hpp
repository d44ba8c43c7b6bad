#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "edgeworth/jets.hpp"
#include "edgeworth/models.hpp"
#include "edgeworth/spectral.hpp"

namespace edgeworth {

/// log mu(t) = i A t - sigma2 t^2 / 2 + psi(t).
struct AsymptoticParams {
  double A = 0.0;
  double sigma2 = 1.0;
  Jet psi;
  Jet logz;

  double sigma() const;
};

using MomentTable = std::map<std::pair<int, int>, double>;

struct ExpansionSet {
  int r = 0;
  AsymptoticParams params;
  /// A_0..A_r as polynomials in the variable (it).
  std::vector<Polynomial> freq;
  /// R_0..R_r.
  std::vector<Polynomial> edge_r;
  /// P_0..P_r; P_0 is the zero polynomial.
  std::vector<Polynomial> edge_p;
  /// P_{0,l}..P_{floor(r/2),l}.
  std::vector<Polynomial> weak_local;
  /// (k, j) -> a_{k,j} for k <= r + 2, j <= floor(k/2).
  MomentTable moments;
  std::optional<Lattice> lattice;
};

/// Throws DegenerateVariance (sigma2 <= 1e-10) and NonRealDrift (|Im A| > 1e-10).
AsymptoticParams asymptotic_params(const SpectralJets& s);

/// Exponentiates n psi(t/sqrt n) + log Z(t/sqrt n) graded by u = n^{-1/2} and
/// returns the u^k slices in the variable (it). Throws ImaginaryResidue.
std::vector<Polynomial> frequency_polys(const AsymptoticParams& params, int r);

/// Probabilists' Hermite polynomial He_m(y).
Polynomial hermite_he(int m);

/// (it)^m -> sigma^{-m} He_m(x/sigma).
Polynomial hermite_transform(const Polynomial& freq_poly, double sigma2);

/// Coefficients b_m of R(x) = sum_m b_m He_m(x/sigma).
std::vector<double> hermite_coefficients(const Polynomial& R, double sigma2);

/// P with n R = (n P)' for n the N(0, sigma2) density. Throws NonZeroMean
/// when the He_0 coefficient of R exceeds 1e-10.
Polynomial antiderivative_poly(const Polynomial& R, double sigma2);

/// max coefficient of |R - (P' - x P / sigma2)|.
double edge_identity_defect(const Polynomial& R, const Polynomial& P, double sigma2);

/// int t^j exp(-sigma2 t^2 / 2) dt over the real line.
double gaussian_moment(int j, double sigma2);

/// Complex int t^j A_k(t) exp(-sigma2 t^2 / 2) dt with A_k given in (it).
Complex gaussian_frequency_integral(const Polynomial& freq_poly, int j, double sigma2);

std::vector<Polynomial> weak_local_polys(const std::vector<Polynomial>& freq, double sigma2, int r);

/// a_{k,j} from exp(n (log mu(t) - mu'(0) t)) Z(t). Throws ImaginaryResidue
/// and DegreeOverflow (a nonzero coefficient with j > floor(k/2)).
MomentTable moment_coefficients(const SpectralJets& s, int kmax);

/// True when every A_k only has degrees of the parity of k within tol.
bool freq_parity_holds(const std::vector<Polynomial>& freq, double tol);

ExpansionSet build_expansion(const SpectralJets& s, int r);

/// Jet order used for an expansion of order r.
int jet_order_for(int r);

ExpansionSet expand(const MarkovModel& model, int r);
/// Needs at least r + 2 raw moments (InsufficientMoments).
ExpansionSet expand(const IidModel& model, int r);

}  // namespace edgeworth
