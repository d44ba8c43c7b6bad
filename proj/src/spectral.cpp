#include "edgeworth/spectral.hpp"

#include <cmath>

#include "edgeworth/error.hpp"

namespace edgeworth {
namespace {

constexpr double kGapTolerance = 1e-8;
constexpr double kSingularRcond = 1e-14;

// Solves a real system for a complex right-hand side, one LU for both parts.
Eigen::VectorXcd solve_split(const Eigen::PartialPivLU<Eigen::MatrixXd>& lu, const Eigen::VectorXcd& rhs) {
  const Eigen::VectorXd re = lu.solve(rhs.real());
  const Eigen::VectorXd im = lu.solve(rhs.imag());
  Eigen::VectorXcd out(rhs.size());
  out.real() = re;
  out.imag() = im;
  return out;
}

Complex bilinear(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) { return (a.array() * b.array()).sum(); }

Jet jet_from_component(const std::vector<Eigen::VectorXcd>& series, int j) {
  Jet out(static_cast<int>(series.size()) - 1);
  for (std::size_t m = 0; m < series.size(); ++m) out[static_cast<int>(m)] = series[m](j);
  return out;
}

}  // namespace

Jet OperatorFamilyJet::entry(int j, int k) const {
  Jet out(order());
  for (int m = 0; m <= order(); ++m) out[m] = coeff[static_cast<std::size_t>(m)](j, k);
  return out;
}

OperatorFamilyJet build_operator_family(const MarkovModel& model, int order) {
  if (order < 2) throw Error(ErrorCode::InvalidConfig, "operator family order must be at least 2");
  const int d = model.dim();
  for (int j = 0; j < d; ++j) {
    for (int k = 0; k < d; ++k) {
      if (model.P(j, k) < 0.0) throw Error(ErrorCode::NegativeProbability, "P has a negative entry");
    }
    if (std::abs(model.P.row(j).sum() - 1.0) > 1e-10) {
      throw Error(ErrorCode::NonStochasticModel, "row " + std::to_string(j) + " of P does not sum to 1");
    }
  }
  OperatorFamilyJet fam;
  const Eigen::MatrixXcd ih = Complex{0.0, 1.0} * model.h.cast<Complex>();
  Eigen::MatrixXcd term = model.P.cast<Complex>();
  for (int m = 0; m <= order; ++m) {
    fam.coeff.push_back(term);
    term = term.cwiseProduct(ih) / static_cast<double>(m + 1);
  }
  fam.ell = model.mu0;
  fam.v = Eigen::VectorXd::Ones(d);
  return fam;
}

OperatorFamilyJet build_operator_family(const IidModel& model, int order) {
  if (order < 2) throw Error(ErrorCode::InvalidConfig, "operator family order must be at least 2");
  if (model.num_moments() < order) {
    throw Error(ErrorCode::InsufficientMoments, "need " + std::to_string(order) + " moments, have " +
                                                    std::to_string(model.num_moments()));
  }
  OperatorFamilyJet fam;
  Complex ik = 1.0;
  double factorial = 1.0;
  for (int m = 0; m <= order; ++m) {
    const double moment = m == 0 ? 1.0 : model.moments[static_cast<std::size_t>(m - 1)];
    fam.coeff.push_back(Eigen::MatrixXcd::Constant(1, 1, moment * ik / factorial));
    ik *= Complex{0.0, 1.0};
    factorial *= m + 1;
  }
  fam.ell = Eigen::VectorXd::Ones(1);
  fam.v = Eigen::VectorXd::Ones(1);
  return fam;
}

PowerIteration power_iteration(const Eigen::MatrixXcd& A, int iterations, double tol) {
  const Eigen::Index d = A.rows();
  Eigen::VectorXcd x(d);
  for (Eigen::Index i = 0; i < d; ++i) x(i) = 1.0 / static_cast<double>(i + 1);
  x /= x.norm();

  std::vector<double> log_growth;
  double prev = -1.0;
  bool settled = false;
  double last = 0.0;
  for (int it = 0; it < iterations; ++it) {
    Eigen::VectorXcd y = A * x;
    const double g = y.norm();
    if (g == 0.0) return {0.0, 0.0};
    log_growth.push_back(std::log(g));
    last = g;
    x = y / g;
    if (prev > 0.0 && std::abs(g - prev) <= tol * g) {
      settled = true;
      break;
    }
    prev = g;
  }
  PowerIteration out;
  if (settled) {
    out.radius = last;
  } else {
    const std::size_t half = log_growth.size() / 2;
    double acc = 0.0;
    for (std::size_t i = half; i < log_growth.size(); ++i) acc += log_growth[i];
    out.radius = std::exp(acc / static_cast<double>(log_growth.size() - half));
  }
  out.eigenvalue = x.dot(A * x) / x.squaredNorm();
  return out;
}

PerronBase perron_base(const Eigen::MatrixXd& P) {
  const Eigen::Index d = P.rows();
  if (d == 0 || P.cols() != d) throw Error(ErrorCode::InconsistentDimensions, "P must be square");
  PerronBase base;
  base.right = Eigen::VectorXd::Ones(d);
  if (d == 1) {
    base.left = Eigen::VectorXd::Ones(1);
    base.gap = 1.0;
    return base;
  }
  Eigen::MatrixXd M = (P - Eigen::MatrixXd::Identity(d, d)).transpose();
  M.row(d - 1).setOnes();
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
  if (!(lu.rcond() > kSingularRcond)) {
    throw Error(ErrorCode::SingularStationarySolve, "eigenvalue 1 of P is not simple");
  }
  Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
  e(d - 1) = 1.0;
  base.left = lu.solve(e);

  const Eigen::MatrixXd deflated = P - base.right * base.left.transpose();
  const double rho = power_iteration(deflated.cast<Complex>()).radius;
  base.gap = 1.0 - rho;
  if (base.gap < kGapTolerance) {
    throw Error(ErrorCode::GapBelowTolerance, "spectral gap estimate " + std::to_string(base.gap));
  }
  return base;
}

Jet SpectralJets::right_entry(int j) const { return jet_from_component(right, j); }
Jet SpectralJets::left_entry(int j) const { return jet_from_component(left, j); }

SpectralJets eigen_perturbation(const OperatorFamilyJet& fam, const PerronBase& base, Gauge gauge) {
  const int d = fam.dim();
  const int s = fam.order();
  const Eigen::MatrixXd L0 = fam.base();
  const Eigen::VectorXd pi = base.left;
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(d);
  const Eigen::VectorXd g = gauge == Gauge::Stationary ? pi : ones / static_cast<double>(d);

  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(d + 1, d + 1);
  B.topLeftCorner(d, d) = L0 - Eigen::MatrixXd::Identity(d, d);
  B.topRightCorner(d, 1) = -ones;
  B.bottomLeftCorner(1, d) = g.transpose();
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu_right(B);

  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(d + 1, d + 1);
  C.topLeftCorner(d, d) = L0.transpose() - Eigen::MatrixXd::Identity(d, d);
  C.topRightCorner(d, 1) = pi;
  C.bottomLeftCorner(1, d) = ones.transpose();
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu_left(C);

  if (!(lu_right.rcond() > kSingularRcond) || !(lu_left.rcond() > kSingularRcond)) {
    throw Error(ErrorCode::BorderedSolveSingular, "bordered perturbation system is singular");
  }

  SpectralJets out{Jet(s), Jet(s), {}, {}};
  out.mu[0] = 1.0;
  out.right.push_back(ones.cast<Complex>());
  for (int m = 1; m <= s; ++m) {
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(d + 1);
    for (int j = 1; j < m; ++j) rhs.head(d) += out.mu[j] * out.right[static_cast<std::size_t>(m - j)];
    for (int j = 1; j <= m; ++j) rhs.head(d) -= fam.coeff[static_cast<std::size_t>(j)] * out.right[static_cast<std::size_t>(m - j)];
    const Eigen::VectorXcd sol = solve_split(lu_right, rhs);
    out.right.push_back(sol.head(d));
    out.mu[m] = sol(d);
  }

  out.left.push_back(pi.cast<Complex>());
  for (int m = 1; m <= s; ++m) {
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(d + 1);
    for (int j = 1; j <= m; ++j) {
      rhs.head(d) += out.mu[j] * out.left[static_cast<std::size_t>(m - j)];
      rhs.head(d) -= fam.coeff[static_cast<std::size_t>(j)].transpose() * out.left[static_cast<std::size_t>(m - j)];
    }
    Complex border{};
    for (int j = 0; j < m; ++j) border -= bilinear(out.left[static_cast<std::size_t>(j)], out.right[static_cast<std::size_t>(m - j)]);
    rhs(d) = border;
    out.left.push_back(solve_split(lu_left, rhs).head(d));
  }

  Jet left_on_v(s), ell_on_right(s);
  const Eigen::VectorXcd v_model = fam.v.cast<Complex>();
  const Eigen::VectorXcd ell_model = fam.ell.cast<Complex>();
  for (int m = 0; m <= s; ++m) {
    left_on_v[m] = bilinear(out.left[static_cast<std::size_t>(m)], v_model);
    ell_on_right[m] = bilinear(ell_model, out.right[static_cast<std::size_t>(m)]);
  }
  out.z = ell_on_right * left_on_v;
  return out;
}

double eigen_residual(const OperatorFamilyJet& fam, const SpectralJets& s) {
  double worst = 0.0;
  const int order = fam.order();
  for (int m = 0; m <= order; ++m) {
    Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(fam.dim());
    for (int j = 0; j <= m; ++j) {
      acc += fam.coeff[static_cast<std::size_t>(j)] * s.right[static_cast<std::size_t>(m - j)];
      acc -= s.mu[j] * s.right[static_cast<std::size_t>(m - j)];
    }
    worst = std::max(worst, acc.cwiseAbs().maxCoeff());
  }
  return worst;
}

Eigen::MatrixXcd operator_at(const MarkovModel& model, double t) {
  const int d = model.dim();
  Eigen::MatrixXcd L(d, d);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) L(j, k) = model.P(j, k) * std::polar(1.0, t * model.h(j, k));
  return L;
}

Complex char_fn(const MarkovModel& model, double t, long long N) {
  const Eigen::MatrixXcd L = operator_at(model, t);
  Eigen::VectorXcd x = Eigen::VectorXcd::Ones(model.dim());
  for (long long n = 0; n < N; ++n) x = L * x;
  return (model.mu0.cast<Complex>().array() * x.array()).sum();
}

std::vector<NormDecayRow> norm_decay_scan(const MarkovModel& model, const std::vector<double>& t_grid, int N) {
  std::vector<NormDecayRow> rows;
  rows.reserve(t_grid.size());
  for (double t : t_grid) {
    const Eigen::MatrixXcd L = operator_at(model, t);
    Eigen::MatrixXcd power = Eigen::MatrixXcd::Identity(model.dim(), model.dim());
    for (int n = 0; n < N; ++n) power = power * L;
    rows.push_back({t, power.cwiseAbs().rowwise().sum().maxCoeff(), power_iteration(L).radius});
  }
  return rows;
}

}  // namespace edgeworth
