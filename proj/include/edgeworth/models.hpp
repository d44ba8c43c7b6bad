#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace edgeworth {

/// Observable values live on the lattice offset + span * Z.
struct Lattice {
  double span = 1.0;
  double offset = 0.0;
};

/// Finite-state chain x_0 ~ mu0, transitions P, increments X_n = h(x_n, x_{n+1}).
///
/// E exp(i t S_N) = mu0^T L_t^N 1 with (L_t)_{jk} = p_{jk} exp(i t h_{jk}).
struct MarkovModel {
  Eigen::MatrixXd P;
  Eigen::MatrixXd h;
  Eigen::VectorXd mu0;
  std::optional<Lattice> lattice;

  int dim() const { return static_cast<int>(P.rows()); }
  double h_min() const;
  double h_max() const;
};

/// Validates and builds a chain; auto-detects the lattice structure of h.
MarkovModel markov_model(Eigen::MatrixXd P, Eigen::MatrixXd h, Eigen::VectorXd mu0);

/// Largest span s (and offset c) such that every value is c + s*k for an
/// integer k within 1e-9, found by rational reconstruction of the pairwise
/// differences with denominators capped at 1e6. Empty when no such span exists.
std::optional<Lattice> detect_lattice(std::span<const double> values);

/// i.i.d. increments, specified either by a finite pmf or by raw moments.
struct IidModel {
  /// Raw moments m_1..m_s.
  std::vector<double> moments;
  /// (value, probability) atoms when the law is given as a pmf.
  std::vector<std::pair<double, double>> pmf;

  int num_moments() const { return static_cast<int>(moments.size()); }
  bool has_pmf() const { return !pmf.empty(); }
};

/// Raw moments up to `num_moments` are computed from the atoms.
IidModel iid_from_pmf(std::vector<std::pair<double, double>> pmf, int num_moments);
IidModel iid_from_moments(std::vector<double> raw_moments);

/// The same law as a chain with identical rows: state k is "the last draw was atom k".
MarkovModel iid_embedding(const IidModel& model);

/// Piecewise linear branch f(x) = y0 + slope * (x - x0) on [x0, x1).
struct MapBranch {
  double x0 = 0.0;
  double x1 = 1.0;
  double y0 = 0.0;
  double slope = 2.0;
};

struct ExpandingMap {
  std::string kind;  // "doubling" or "piecewise_linear"
  std::vector<MapBranch> branches;

  double operator()(double x) const;
  double min_abs_slope() const;
};

ExpandingMap doubling_map();
/// Branches must tile [0, 1) and map into [0, 1]; |slope| <= 1 throws SlopeBelowOne.
ExpandingMap piecewise_linear_map(std::vector<MapBranch> branches);

/// Observable g on [0, 1].
struct Observable {
  enum class Kind { Constant, Cosine, Polynomial, Step };
  Kind kind = Kind::Cosine;
  // Constant: params = {c}. Cosine: {amplitude, frequency, phase} -> a cos(2 pi k x + phase).
  // Polynomial: coefficients. Step: breakpoints in `breaks`, one value per piece in params.
  std::vector<double> params;
  std::vector<double> breaks;

  double operator()(double x) const;

  static Observable constant(double c) { return {Kind::Constant, {c}, {}}; }
  static Observable cosine(double amplitude = 1.0, double frequency = 1.0, double phase = 0.0) {
    return {Kind::Cosine, {amplitude, frequency, phase}, {}};
  }
};

struct UlamSpec {
  ExpandingMap map = doubling_map();
  Observable g = Observable::cosine();
  int cells = 1024;
  /// Initial density on [0, 1]; uniform when empty.
  std::function<double(double)> density;
};

/// M_{jk} = Leb(cell_j ∩ f^{-1} cell_k) / Leb(cell_j); h_{jk} = g at the midpoint
/// of cell_j ∩ f^{-1} cell_k (length-weighted across branches). Throws
/// SlopeBelowOne, and InvalidConfig when cells < 16.
MarkovModel ulam_model(const UlamSpec& spec);

struct DiophantineScan {
  std::vector<double> s;
  std::vector<double> d;
  double K = 0.0;
  double beta = 0.0;
  double residual = 0.0;  // RMS of the log-log fit
  int fit_points = 0;
};

/// d(s) = max over r, j and k >= 2 of ||(b_{r,j,k} - b_{r,1,k}) s||, with
/// b_{r,j,k} = h_{rj} + h_{jk} and ||.|| the distance to the nearest integer.
double diophantine_d(const Eigen::MatrixXd& h, double s);

/// Evaluates d on the grid and fits d(s) ~ K |s|^(-beta) by least squares in
/// log-log coordinates over the running minima (lower envelope) of d.
DiophantineScan diophantine_scan(const Eigen::MatrixXd& h, std::span<const double> s_grid);

}  // namespace edgeworth
