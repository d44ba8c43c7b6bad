#include "edgeworth/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "edgeworth/error.hpp"

namespace edgeworth {
namespace {

constexpr double kStochasticTol = 1e-12;
constexpr double kLatticeTol = 1e-9;
constexpr long long kMaxDenominator = 1'000'000;

void check_distribution(const Eigen::VectorXd& v, const char* what) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!(v(i) >= 0.0)) throw Error(ErrorCode::NegativeProbability, std::string(what) + " has a negative entry");
  }
  if (std::abs(v.sum() - 1.0) > kStochasticTol) {
    throw Error(ErrorCode::NonStochasticModel, std::string(what) + " does not sum to 1");
  }
}

// Smallest-denominator rational p/q with |x q - p| <= tol and q <= kMaxDenominator.
std::optional<long long> rational_denominator(double x) {
  double rem = x;
  long long p_prev = 1, q_prev = 0;
  long long p = static_cast<long long>(std::floor(rem)), q = 1;
  rem -= std::floor(rem);
  while (true) {
    if (std::abs(x * static_cast<double>(q) - static_cast<double>(p)) <= kLatticeTol) return q;
    if (rem < 1e-15) return std::nullopt;
    rem = 1.0 / rem;
    const double a_real = std::floor(rem);
    if (a_real > static_cast<double>(kMaxDenominator)) return std::nullopt;
    const auto a = static_cast<long long>(a_real);
    rem -= a_real;
    const long long p_next = a * p + p_prev;
    const long long q_next = a * q + q_prev;
    if (q_next > kMaxDenominator) return std::nullopt;
    p_prev = p;
    q_prev = q;
    p = p_next;
    q = q_next;
  }
}

double nearest_integer_distance(double x) { return std::abs(x - std::round(x)); }

}  // namespace

double MarkovModel::h_min() const {
  double m = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < P.rows(); ++j)
    for (Eigen::Index k = 0; k < P.cols(); ++k)
      if (P(j, k) > 0.0) m = std::min(m, h(j, k));
  return m;
}

double MarkovModel::h_max() const {
  double m = -std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < P.rows(); ++j)
    for (Eigen::Index k = 0; k < P.cols(); ++k)
      if (P(j, k) > 0.0) m = std::max(m, h(j, k));
  return m;
}

std::optional<Lattice> detect_lattice(std::span<const double> values) {
  if (values.empty()) return Lattice{};
  const double ref = values.front();
  std::vector<double> diffs;
  for (double v : values) {
    if (!std::isfinite(v)) return std::nullopt;
    const double d = v - ref;
    if (std::abs(d) > 1e-12) diffs.push_back(d);
  }
  if (diffs.empty()) return Lattice{1.0, ref - std::floor(ref)};

  const double base = std::abs(*std::min_element(diffs.begin(), diffs.end(),
                                                 [](double a, double b) { return std::abs(a) < std::abs(b); }));
  long long denom = 1;
  for (double d : diffs) {
    const auto q = rational_denominator(std::abs(d) / base);
    if (!q) return std::nullopt;
    denom = std::lcm(denom, *q);
    if (denom > kMaxDenominator) return std::nullopt;
  }
  const double fine = base / static_cast<double>(denom);
  long long g = 0;
  for (double d : diffs) g = std::gcd(g, std::llabs(std::llround(d / fine)));
  const double span = fine * static_cast<double>(g);

  Lattice lat{span, ref - span * std::floor(ref / span)};
  for (double v : values) {
    if (nearest_integer_distance((v - lat.offset) / span) > kLatticeTol) return std::nullopt;
  }
  return lat;
}

MarkovModel markov_model(Eigen::MatrixXd P, Eigen::MatrixXd h, Eigen::VectorXd mu0) {
  const Eigen::Index d = P.rows();
  if (d == 0 || P.cols() != d || h.rows() != d || h.cols() != d || mu0.size() != d) {
    throw Error(ErrorCode::InconsistentDimensions, "P, h must be d x d and mu0 of length d");
  }
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index k = 0; k < d; ++k) {
      if (!(P(j, k) >= 0.0)) throw Error(ErrorCode::NegativeProbability, "P has a negative entry");
      if (!std::isfinite(h(j, k))) throw Error(ErrorCode::InvalidConfig, "h has a non-finite entry");
    }
    if (std::abs(P.row(j).sum() - 1.0) > kStochasticTol) {
      throw Error(ErrorCode::NonStochasticModel, "row " + std::to_string(j) + " of P does not sum to 1");
    }
  }
  check_distribution(mu0, "mu0");

  MarkovModel m{std::move(P), std::move(h), std::move(mu0), std::nullopt};
  std::vector<double> values;
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index k = 0; k < d; ++k)
      if (m.P(j, k) > 0.0) values.push_back(m.h(j, k));
  m.lattice = detect_lattice(values);
  return m;
}

IidModel iid_from_pmf(std::vector<std::pair<double, double>> pmf, int num_moments) {
  if (pmf.empty()) throw Error(ErrorCode::InvalidConfig, "empty pmf");
  double total = 0.0;
  for (const auto& [x, p] : pmf) {
    if (!(p >= 0.0)) throw Error(ErrorCode::NegativeProbability, "pmf has a negative probability");
    if (!std::isfinite(x)) throw Error(ErrorCode::InvalidConfig, "pmf has a non-finite atom");
    total += p;
  }
  if (std::abs(total - 1.0) > kStochasticTol) throw Error(ErrorCode::NonStochasticModel, "pmf does not sum to 1");

  IidModel m;
  m.pmf = std::move(pmf);
  m.moments.assign(static_cast<std::size_t>(std::max(num_moments, 0)), 0.0);
  for (const auto& [x, p] : m.pmf) {
    double xk = 1.0;
    for (auto& mk : m.moments) {
      xk *= x;
      mk += p * xk;
    }
  }
  return m;
}

IidModel iid_from_moments(std::vector<double> raw_moments) {
  for (double v : raw_moments) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidConfig, "non-finite moment");
  }
  // Hankel matrix H_{ij} = m_{i+j}, m_0 = 1, must be positive semidefinite.
  const int half = static_cast<int>(raw_moments.size()) / 2;
  Eigen::MatrixXd H(half + 1, half + 1);
  for (int i = 0; i <= half; ++i)
    for (int j = 0; j <= half; ++j) H(i, j) = i + j == 0 ? 1.0 : raw_moments[static_cast<std::size_t>(i + j - 1)];
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(H, Eigen::EigenvaluesOnly);
  const double scale = std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
  if (eig.eigenvalues().minCoeff() < -1e-10 * scale) {
    throw Error(ErrorCode::InvalidConfig, "moment sequence is not positive semidefinite");
  }
  IidModel m;
  m.moments = std::move(raw_moments);
  return m;
}

MarkovModel iid_embedding(const IidModel& model) {
  if (!model.has_pmf()) throw Error(ErrorCode::InvalidConfig, "chain embedding needs a pmf");
  const auto d = static_cast<Eigen::Index>(model.pmf.size());
  Eigen::VectorXd q(d);
  Eigen::MatrixXd h(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    q(k) = model.pmf[static_cast<std::size_t>(k)].second;
    h.col(k).setConstant(model.pmf[static_cast<std::size_t>(k)].first);
  }
  Eigen::MatrixXd P = q.transpose().replicate(d, 1);
  return markov_model(std::move(P), std::move(h), q);
}

double ExpandingMap::operator()(double x) const {
  for (const auto& b : branches) {
    if (x >= b.x0 && x < b.x1) return b.y0 + b.slope * (x - b.x0);
  }
  const auto& last = branches.back();
  return last.y0 + last.slope * (x - last.x0);
}

double ExpandingMap::min_abs_slope() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& b : branches) m = std::min(m, std::abs(b.slope));
  return m;
}

ExpandingMap doubling_map() { return {"doubling", {{0.0, 0.5, 0.0, 2.0}, {0.5, 1.0, 0.0, 2.0}}}; }

ExpandingMap piecewise_linear_map(std::vector<MapBranch> branches) {
  if (branches.empty()) throw Error(ErrorCode::InvalidConfig, "map has no branches");
  std::sort(branches.begin(), branches.end(), [](const MapBranch& a, const MapBranch& b) { return a.x0 < b.x0; });
  double cursor = 0.0;
  for (const auto& b : branches) {
    if (std::abs(b.x0 - cursor) > 1e-12 || !(b.x1 > b.x0)) {
      throw Error(ErrorCode::InvalidConfig, "branches must tile [0, 1)");
    }
    if (!(std::abs(b.slope) > 1.0)) throw Error(ErrorCode::SlopeBelowOne, "branch slope must exceed 1 in modulus");
    const double y1 = b.y0 + b.slope * (b.x1 - b.x0);
    if (std::min(b.y0, y1) < -1e-12 || std::max(b.y0, y1) > 1.0 + 1e-12) {
      throw Error(ErrorCode::InvalidConfig, "branch image leaves [0, 1]");
    }
    cursor = b.x1;
  }
  if (std::abs(cursor - 1.0) > 1e-12) throw Error(ErrorCode::InvalidConfig, "branches must tile [0, 1)");
  return {"piecewise_linear", std::move(branches)};
}

double Observable::operator()(double x) const {
  switch (kind) {
    case Kind::Constant:
      return params.at(0);
    case Kind::Cosine:
      return params.at(0) * std::cos(2.0 * std::numbers::pi * params.at(1) * x + params.at(2));
    case Kind::Polynomial: {
      double acc = 0.0;
      for (auto it = params.rbegin(); it != params.rend(); ++it) acc = acc * x + *it;
      return acc;
    }
    case Kind::Step: {
      const auto piece = std::upper_bound(breaks.begin(), breaks.end(), x) - breaks.begin();
      return params.at(static_cast<std::size_t>(piece));
    }
  }
  return 0.0;
}

MarkovModel ulam_model(const UlamSpec& spec) {
  if (spec.cells < 16) throw Error(ErrorCode::InvalidConfig, "Ulam discretization needs at least 16 cells");
  const ExpandingMap map = spec.map.kind == "doubling" ? spec.map : piecewise_linear_map(spec.map.branches);
  if (!(map.min_abs_slope() > 1.0)) throw Error(ErrorCode::SlopeBelowOne, "map is not expanding");

  const int n = spec.cells;
  const double w = 1.0 / n;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd hsum = Eigen::MatrixXd::Zero(n, n);

  for (const auto& b : map.branches) {
    const int j_lo = std::max(0, static_cast<int>(std::floor(b.x0 * n)));
    const int j_hi = std::min(n - 1, static_cast<int>(std::ceil(b.x1 * n)) - 1);
    for (int j = j_lo; j <= j_hi; ++j) {
      const double a = std::max(j * w, b.x0);
      const double c = std::min((j + 1) * w, b.x1);
      if (!(c > a)) continue;
      const double fa = b.y0 + b.slope * (a - b.x0);
      const double fc = b.y0 + b.slope * (c - b.x0);
      const double ylo = std::clamp(std::min(fa, fc), 0.0, 1.0);
      const double yhi = std::clamp(std::max(fa, fc), 0.0, 1.0);
      const int k_lo = std::max(0, static_cast<int>(std::floor(ylo * n)));
      const int k_hi = std::min(n - 1, static_cast<int>(std::ceil(yhi * n)) - 1);
      for (int k = k_lo; k <= k_hi; ++k) {
        const double olo = std::max(k * w, ylo);
        const double ohi = std::min((k + 1) * w, yhi);
        if (!(ohi > olo)) continue;
        const double len = (ohi - olo) / std::abs(b.slope);
        const double x_mid = b.x0 + (0.5 * (olo + ohi) - b.y0) / b.slope;
        M(j, k) += len / w;
        hsum(j, k) += len * spec.g(x_mid);
      }
    }
  }

  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    const double row = M.row(j).sum();
    if (std::abs(row - 1.0) > 1e-9) throw Error(ErrorCode::NonStochasticModel, "Ulam row does not sum to 1");
    M.row(j) /= row;
    for (int k = 0; k < n; ++k)
      if (M(j, k) > 0.0) h(j, k) = hsum(j, k) / (M(j, k) * row * w);
  }

  Eigen::VectorXd mu0(n);
  if (spec.density) {
    for (int j = 0; j < n; ++j) {
      // Simpson's rule per cell.
      const double a = j * w;
      mu0(j) = w / 6.0 * (spec.density(a) + 4.0 * spec.density(a + 0.5 * w) + spec.density(a + w));
      if (mu0(j) < 0.0) throw Error(ErrorCode::NegativeProbability, "density is negative");
    }
    const double total = mu0.sum();
    if (!(total > 0.0)) throw Error(ErrorCode::InvalidConfig, "density has zero mass");
    mu0 /= total;
  } else {
    mu0.setConstant(w);
    mu0 /= mu0.sum();
  }
  return markov_model(std::move(M), std::move(h), std::move(mu0));
}

double diophantine_d(const Eigen::MatrixXd& h, double s) {
  const Eigen::Index d = h.rows();
  double worst = 0.0;
  for (Eigen::Index r = 0; r < d; ++r) {
    for (Eigen::Index k = 1; k < d; ++k) {
      const double ref = h(r, 0) + h(0, k);
      for (Eigen::Index j = 1; j < d; ++j) {
        const double diff = h(r, j) + h(j, k) - ref;
        worst = std::max(worst, nearest_integer_distance(diff * s));
      }
    }
  }
  return worst;
}

DiophantineScan diophantine_scan(const Eigen::MatrixXd& h, std::span<const double> s_grid) {
  if (h.rows() < 2 || h.cols() != h.rows()) {
    throw Error(ErrorCode::InconsistentDimensions, "Diophantine scan needs a square h with d >= 2");
  }
  DiophantineScan out;
  out.s.assign(s_grid.begin(), s_grid.end());
  out.d.reserve(out.s.size());
  for (double s : out.s) out.d.push_back(diophantine_d(h, s));

  std::vector<std::size_t> order(out.s.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return std::abs(out.s[a]) < std::abs(out.s[b]); });

  std::vector<double> xs, ys;
  double running = std::numeric_limits<double>::infinity();
  for (std::size_t i : order) {
    const double s = std::abs(out.s[i]);
    const double dv = out.d[i];
    if (s <= 0.0 || !(dv > 0.0)) continue;
    if (dv < running) {
      running = dv;
      xs.push_back(std::log(s));
      ys.push_back(std::log(dv));
    }
  }
  out.fit_points = static_cast<int>(xs.size());
  if (xs.size() < 2) return out;

  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx <= 0.0) return out;
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  out.beta = -slope;
  out.K = std::exp(intercept);
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - (intercept + slope * xs[i]);
    ss += e * e;
  }
  out.residual = std::sqrt(ss / n);
  return out;
}

}  // namespace edgeworth
