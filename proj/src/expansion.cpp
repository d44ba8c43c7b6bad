#include "edgeworth/expansion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "edgeworth/error.hpp"

namespace edgeworth {
namespace {

constexpr double kDriftTol = 1e-10;
constexpr double kVarianceTol = 1e-10;
constexpr double kFreqRealTol = 1e-11;
constexpr double kMomentRealTol = 1e-10;
constexpr double kMeanTol = 1e-10;

const Complex kI{0.0, 1.0};

Complex ipow(int m) {
  switch (((m % 4) + 4) % 4) {
    case 0: return 1.0;
    case 1: return kI;
    case 2: return -1.0;
    default: return -kI;
  }
}

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

}  // namespace

double AsymptoticParams::sigma() const { return std::sqrt(sigma2); }

AsymptoticParams asymptotic_params(const SpectralJets& s) {
  if (s.mu.order() < 2) throw Error(ErrorCode::InvalidConfig, "eigenvalue jet must have order >= 2");
  const Complex mu1 = s.mu[1];
  const Complex mu2 = s.mu[2];
  const Complex A = -kI * mu1;
  if (std::abs(A.imag()) > kDriftTol) {
    throw Error(ErrorCode::NonRealDrift, "imaginary drift " + std::to_string(A.imag()));
  }
  AsymptoticParams p;
  p.A = A.real();
  p.sigma2 = (mu1 * mu1 - 2.0 * mu2).real();
  if (!(p.sigma2 > kVarianceTol)) {
    throw Error(ErrorCode::DegenerateVariance, "asymptotic variance " + std::to_string(p.sigma2));
  }
  p.psi = jet_log(s.mu);
  p.psi[1] -= kI * p.A;
  if (p.psi.order() >= 2) p.psi[2] += 0.5 * p.sigma2;
  p.logz = jet_log(s.z);
  return p;
}

std::vector<Polynomial> frequency_polys(const AsymptoticParams& params, int r) {
  if (r < 0) throw Error(ErrorCode::InvalidConfig, "negative expansion order");
  if (params.psi.order() < r + 2 || params.logz.order() < r) {
    throw Error(ErrorCode::InsufficientMoments, "jets too short for order " + std::to_string(r));
  }
  const int t_max = 3 * r + 2;
  BivariateSeries s(t_max, r);
  for (int m = 3; m <= std::min(params.psi.order(), t_max); ++m) {
    if (m - 2 <= r) s.at(m, m - 2) = params.psi[m];
  }
  for (int m = 1; m <= std::min(params.logz.order(), r); ++m) s.at(m, m) = params.logz[m];

  const BivariateSeries e = bi_exp(s);
  std::vector<Polynomial> out;
  for (int k = 0; k <= r; ++k) {
    std::vector<double> coeffs(static_cast<std::size_t>(t_max) + 1, 0.0);
    for (int m = 0; m <= t_max; ++m) {
      const Complex a = e.at(m, k) * ipow(-m);
      if (std::abs(a.imag()) > kFreqRealTol * std::max(1.0, std::abs(a.real()))) {
        throw Error(ErrorCode::ImaginaryResidue,
                    "A_" + std::to_string(k) + " coefficient of (it)^" + std::to_string(m) + " is not real");
      }
      coeffs[static_cast<std::size_t>(m)] = a.real();
    }
    out.emplace_back(std::move(coeffs));
  }
  return out;
}

Polynomial hermite_he(int m) {
  Polynomial prev;  // He_{-1} = 0
  Polynomial cur = Polynomial::constant(1.0);
  const Polynomial y = Polynomial::monomial(1);
  for (int n = 0; n < m; ++n) {
    Polynomial next = y * cur - static_cast<double>(n) * prev;
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

namespace {

// He_m(x / sigma) as a polynomial in x.
Polynomial hermite_scaled(int m, double sigma) {
  const Polynomial he = hermite_he(m);
  std::vector<double> c(static_cast<std::size_t>(std::max(he.degree(), 0)) + 1, 0.0);
  for (int j = 0; j <= he.degree(); ++j) c[static_cast<std::size_t>(j)] = he.coeff(j) / std::pow(sigma, j);
  return Polynomial(std::move(c));
}

}  // namespace

Polynomial hermite_transform(const Polynomial& freq_poly, double sigma2) {
  const double sigma = std::sqrt(sigma2);
  Polynomial R;
  for (int m = 0; m <= freq_poly.degree(); ++m) {
    const double a = freq_poly.coeff(m);
    if (a == 0.0) continue;
    R += (a / std::pow(sigma, m)) * hermite_scaled(m, sigma);
  }
  return R;
}

std::vector<double> hermite_coefficients(const Polynomial& R, double sigma2) {
  const double sigma = std::sqrt(sigma2);
  const int deg = R.degree();
  if (deg < 0) return {};
  // Work in y = x / sigma, then peel off He_m from the top degree down.
  std::vector<double> c(static_cast<std::size_t>(deg) + 1);
  for (int j = 0; j <= deg; ++j) c[static_cast<std::size_t>(j)] = R.coeff(j) * std::pow(sigma, j);
  std::vector<double> b(c.size(), 0.0);
  for (int m = deg; m >= 0; --m) {
    const double bm = c[static_cast<std::size_t>(m)];
    b[static_cast<std::size_t>(m)] = bm;
    if (bm == 0.0) continue;
    const Polynomial he = hermite_he(m);
    for (int j = 0; j <= m; ++j) c[static_cast<std::size_t>(j)] -= bm * he.coeff(j);
  }
  return b;
}

Polynomial antiderivative_poly(const Polynomial& R, double sigma2) {
  const double sigma = std::sqrt(sigma2);
  const std::vector<double> b = hermite_coefficients(R, sigma2);
  if (b.empty()) return {};
  double scale = 1.0;
  for (double v : b) scale = std::max(scale, std::abs(v));
  if (std::abs(b[0]) > kMeanTol * scale) {
    throw Error(ErrorCode::NonZeroMean, "He_0 coefficient " + std::to_string(b[0]));
  }
  Polynomial P;
  for (std::size_t m = 1; m < b.size(); ++m) {
    if (b[m] == 0.0) continue;
    P += (-sigma * b[m]) * hermite_scaled(static_cast<int>(m) - 1, sigma);
  }
  return P;
}

double edge_identity_defect(const Polynomial& R, const Polynomial& P, double sigma2) {
  const Polynomial rhs = P.derivative() - (1.0 / sigma2) * (Polynomial::monomial(1) * P);
  return R.max_abs_diff(rhs);
}

double gaussian_moment(int j, double sigma2) {
  if (j < 0 || j % 2 != 0) return 0.0;
  double double_factorial = 1.0;
  for (int k = j - 1; k > 1; k -= 2) double_factorial *= k;
  return std::sqrt(2.0 * std::numbers::pi / sigma2) * double_factorial / std::pow(sigma2, j / 2);
}

Complex gaussian_frequency_integral(const Polynomial& freq_poly, int j, double sigma2) {
  Complex acc{};
  for (int m = 0; m <= freq_poly.degree(); ++m) {
    const double a = freq_poly.coeff(m);
    if (a == 0.0) continue;
    acc += a * ipow(m) * gaussian_moment(m + j, sigma2);
  }
  return acc;
}

std::vector<Polynomial> weak_local_polys(const std::vector<Polynomial>& freq, double sigma2, int r) {
  const int pmax = r / 2;
  if (static_cast<int>(freq.size()) <= 2 * pmax) {
    throw Error(ErrorCode::InvalidConfig, "frequency polynomials do not reach order " + std::to_string(2 * pmax));
  }
  std::vector<Polynomial> out;
  for (int p = 0; p <= pmax; ++p) {
    std::vector<double> c(static_cast<std::size_t>(2 * p) + 1, 0.0);
    for (int j = 0; j <= 2 * p; ++j) {
      const int k = 2 * p - j;
      const Complex v = gaussian_frequency_integral(freq[static_cast<std::size_t>(k)], j, sigma2) * ipow(-j) / factorial(j);
      if (std::abs(v.imag()) > kMomentRealTol * std::max(1.0, std::abs(v.real()))) {
        throw Error(ErrorCode::ImaginaryResidue, "weak-local coefficient is not real");
      }
      c[static_cast<std::size_t>(j)] = v.real();
    }
    out.emplace_back(std::move(c));
  }
  return out;
}

MomentTable moment_coefficients(const SpectralJets& s, int kmax) {
  if (s.mu.order() < kmax || s.z.order() < kmax) {
    throw Error(ErrorCode::InsufficientMoments, "jets too short for moments of order " + std::to_string(kmax));
  }
  Jet g = jet_log(s.mu.truncated(kmax));
  g[0] = 0.0;
  g[1] = 0.0;
  BivariateSeries series(kmax, kmax);
  for (int m = 0; m <= kmax; ++m) series.at(m, 1) = g[m];
  const BivariateSeries e = bi_exp(series);

  BivariateSeries zs(kmax, kmax);
  for (int m = 0; m <= kmax; ++m) zs.at(m, 0) = s.z[m];
  const BivariateSeries prod = e * zs;

  MomentTable out;
  for (int k = 0; k <= kmax; ++k) {
    const double kf = factorial(k);
    double row_scale = 1.0;
    for (int j = 0; j <= k / 2; ++j) row_scale = std::max(row_scale, std::abs(prod.at(k, j)) * kf);
    for (int j = 0; j <= kmax; ++j) {
      const Complex a = prod.at(k, j) * kf * ipow(-k);
      const double scale = std::max(1.0, std::abs(a));
      if (j > k / 2) {
        if (std::abs(a) > kMomentRealTol * row_scale) {
          throw Error(ErrorCode::DegreeOverflow,
                      "moment coefficient (" + std::to_string(k) + ", " + std::to_string(j) + ") is nonzero");
        }
        continue;
      }
      if (std::abs(a.imag()) > kMomentRealTol * scale) {
        throw Error(ErrorCode::ImaginaryResidue,
                    "moment coefficient (" + std::to_string(k) + ", " + std::to_string(j) + ") is not real");
      }
      out[{k, j}] = a.real();
    }
  }
  return out;
}

bool freq_parity_holds(const std::vector<Polynomial>& freq, double tol) {
  for (std::size_t k = 0; k < freq.size(); ++k) {
    if (!freq[k].has_parity(static_cast<int>(k % 2), tol)) return false;
  }
  return true;
}

ExpansionSet build_expansion(const SpectralJets& s, int r) {
  if (r < 0 || r > 8) throw Error(ErrorCode::InvalidConfig, "expansion order must lie in [0, 8]");
  ExpansionSet out;
  out.r = r;
  out.params = asymptotic_params(s);
  const double sigma2 = out.params.sigma2;
  out.freq = frequency_polys(out.params, r);
  for (const auto& a : out.freq) out.edge_r.push_back(hermite_transform(a, sigma2));
  out.edge_p.emplace_back();
  for (int p = 1; p <= r; ++p) out.edge_p.push_back(antiderivative_poly(out.edge_r[static_cast<std::size_t>(p)], sigma2));
  out.weak_local = weak_local_polys(out.freq, sigma2, r);
  out.moments = moment_coefficients(s, r + 2);
  return out;
}

int jet_order_for(int r) { return std::max(r + 3, 4); }

ExpansionSet expand(const MarkovModel& model, int r) {
  const OperatorFamilyJet fam = build_operator_family(model, jet_order_for(r));
  const PerronBase base = perron_base(model.P);
  ExpansionSet out = build_expansion(eigen_perturbation(fam, base), r);
  out.lattice = model.lattice;
  return out;
}

ExpansionSet expand(const IidModel& model, int r) {
  const int needed = std::max(r + 2, 2);
  if (model.num_moments() < needed) {
    throw Error(ErrorCode::InsufficientMoments,
                "order " + std::to_string(r) + " needs " + std::to_string(needed) + " moments");
  }
  const int order = std::min(jet_order_for(r), model.num_moments());
  const OperatorFamilyJet fam = build_operator_family(model, order);
  const PerronBase base = perron_base(fam.base());
  ExpansionSet out = build_expansion(eigen_perturbation(fam, base), r);
  if (model.has_pmf()) {
    std::vector<double> atoms;
    for (const auto& [x, p] : model.pmf)
      if (p > 0.0) atoms.push_back(x);
    out.lattice = detect_lattice(atoms);
  }
  return out;
}

}  // namespace edgeworth
