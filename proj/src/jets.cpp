#include "edgeworth/jets.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "edgeworth/error.hpp"

namespace edgeworth {
namespace {

constexpr double kTinyConstantTerm = 1e-300;

void require_same_order(const Jet& a, const Jet& b) {
  if (a.order() != b.order()) {
    throw Error(ErrorCode::InconsistentDimensions,
                "jet orders differ: " + std::to_string(a.order()) + " vs " + std::to_string(b.order()));
  }
}

}  // namespace

Jet::Jet(int order) : coeffs_(static_cast<std::size_t>(std::max(order, 0)) + 1, Complex{}) {}

Jet::Jet(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) coeffs_.emplace_back();
}

Jet Jet::constant(Complex value, int order) {
  Jet j(order);
  j[0] = value;
  return j;
}

Jet Jet::variable(int order) {
  Jet j(order);
  if (order >= 1) j[1] = 1.0;
  return j;
}

Complex Jet::eval(Complex t) const {
  Complex acc{};
  for (int m = order(); m >= 0; --m) acc = acc * t + coeffs_[static_cast<std::size_t>(m)];
  return acc;
}

Complex Jet::derivative_at_zero(int m) const {
  double factorial = 1.0;
  for (int k = 2; k <= m; ++k) factorial *= k;
  return factorial * (*this)[m];
}

Jet Jet::truncated(int new_order) const {
  Jet out(new_order);
  for (int m = 0; m <= std::min(order(), new_order); ++m) out[m] = (*this)[m];
  return out;
}

Jet& Jet::operator+=(const Jet& other) {
  require_same_order(*this, other);
  for (std::size_t m = 0; m < coeffs_.size(); ++m) coeffs_[m] += other.coeffs_[m];
  return *this;
}

Jet& Jet::operator-=(const Jet& other) {
  require_same_order(*this, other);
  for (std::size_t m = 0; m < coeffs_.size(); ++m) coeffs_[m] -= other.coeffs_[m];
  return *this;
}

Jet& Jet::operator*=(Complex scalar) {
  for (auto& c : coeffs_) c *= scalar;
  return *this;
}

Jet operator*(Complex scalar, const Jet& a) {
  Jet out = a;
  out *= scalar;
  return out;
}

Jet jet_add(const Jet& a, const Jet& b) {
  Jet out = a;
  out += b;
  return out;
}

Jet jet_sub(const Jet& a, const Jet& b) {
  Jet out = a;
  out -= b;
  return out;
}

Jet jet_mul(const Jet& a, const Jet& b) {
  require_same_order(a, b);
  const int s = a.order();
  Jet out(s);
  for (int m = 0; m <= s; ++m) {
    Complex acc{};
    for (int i = 0; 2 * i < m; ++i) acc += a[i] * b[m - i] + a[m - i] * b[i];
    if (m % 2 == 0) acc += a[m / 2] * b[m / 2];
    out[m] = acc;
  }
  return out;
}

Jet jet_div(const Jet& a, const Jet& b) {
  require_same_order(a, b);
  if (std::abs(b[0]) <= kTinyConstantTerm) {
    throw Error(ErrorCode::DivByZeroConstantTerm, "divisor has vanishing constant term");
  }
  const int s = a.order();
  Jet q(s);
  for (int m = 0; m <= s; ++m) {
    Complex acc = a[m];
    for (int k = 1; k <= m; ++k) acc -= b[k] * q[m - k];
    q[m] = acc / b[0];
  }
  return q;
}

Jet jet_exp(const Jet& a) {
  const int s = a.order();
  Jet e(s);
  e[0] = std::exp(a[0]);
  for (int m = 1; m <= s; ++m) {
    Complex acc{};
    for (int k = 1; k <= m; ++k) acc += static_cast<double>(k) * a[k] * e[m - k];
    e[m] = acc / static_cast<double>(m);
  }
  return e;
}

Jet jet_log(const Jet& a) {
  if (std::abs(a[0]) <= kTinyConstantTerm) {
    throw Error(ErrorCode::LogOfZeroConstantTerm, "log of a series with vanishing constant term");
  }
  const int s = a.order();
  Jet l(s);
  l[0] = std::log(a[0]);
  for (int m = 1; m <= s; ++m) {
    Complex acc = a[m];
    for (int k = 1; k < m; ++k) acc -= (static_cast<double>(k) / m) * l[k] * a[m - k];
    l[m] = acc / a[0];
  }
  return l;
}

Jet jet_exp_i(double h, double p, int order) {
  Jet j(order);
  Complex term = p;
  const Complex ih{0.0, h};
  for (int m = 0; m <= order; ++m) {
    j[m] = term;
    term *= ih / static_cast<double>(m + 1);
  }
  return j;
}

// ---------------------------------------------------------------------------
// BivariateSeries

BivariateSeries::BivariateSeries(int t_max, int u_max)
    : t_max_(t_max),
      u_max_(u_max),
      coeffs_(static_cast<std::size_t>(t_max + 1) * static_cast<std::size_t>(u_max + 1), Complex{}) {}

Jet BivariateSeries::u_slice(int k) const {
  Jet j(t_max_);
  for (int m = 0; m <= t_max_; ++m) j[m] = at(m, k);
  return j;
}

void BivariateSeries::set_u_slice(int k, const Jet& slice) {
  for (int m = 0; m <= t_max_; ++m) at(m, k) = m <= slice.order() ? slice[m] : Complex{};
}

Jet BivariateSeries::eval_u(Complex u) const {
  Jet out(t_max_);
  Complex uk = 1.0;
  for (int k = 0; k <= u_max_; ++k) {
    for (int m = 0; m <= t_max_; ++m) out[m] += at(m, k) * uk;
    uk *= u;
  }
  return out;
}

BivariateSeries& BivariateSeries::operator+=(const BivariateSeries& other) {
  if (other.t_max_ != t_max_ || other.u_max_ != u_max_) {
    throw Error(ErrorCode::InconsistentDimensions, "bivariate truncations differ");
  }
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

BivariateSeries& BivariateSeries::operator*=(Complex scalar) {
  for (auto& c : coeffs_) c *= scalar;
  return *this;
}

BivariateSeries operator*(const BivariateSeries& a, const BivariateSeries& b) {
  if (a.t_max_ != b.t_max_ || a.u_max_ != b.u_max_) {
    throw Error(ErrorCode::InconsistentDimensions, "bivariate truncations differ");
  }
  BivariateSeries out(a.t_max_, a.u_max_);
  for (int ka = 0; ka <= a.u_max_; ++ka) {
    for (int ma = 0; ma <= a.t_max_; ++ma) {
      const Complex ca = a.at(ma, ka);
      if (ca == Complex{}) continue;
      for (int kb = 0; ka + kb <= a.u_max_; ++kb) {
        for (int mb = 0; ma + mb <= a.t_max_; ++mb) out.at(ma + mb, ka + kb) += ca * b.at(mb, kb);
      }
    }
  }
  return out;
}

BivariateSeries bi_exp(const BivariateSeries& s) {
  const int tm = s.t_max();
  const int um = s.u_max();
  std::vector<Jet> slices;
  slices.reserve(static_cast<std::size_t>(um) + 1);
  for (int k = 0; k <= um; ++k) slices.push_back(s.u_slice(k));

  std::vector<Jet> e;
  e.reserve(slices.size());
  e.push_back(jet_exp(slices[0]));
  for (int k = 1; k <= um; ++k) {
    Jet acc(tm);
    for (int j = 1; j <= k; ++j) acc += static_cast<double>(j) * jet_mul(slices[static_cast<std::size_t>(j)], e[static_cast<std::size_t>(k - j)]);
    acc *= 1.0 / k;
    e.push_back(acc);
  }

  BivariateSeries out(tm, um);
  for (int k = 0; k <= um; ++k) out.set_u_slice(k, e[static_cast<std::size_t>(k)]);
  return out;
}

// ---------------------------------------------------------------------------
// Polynomial

Polynomial::Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

Polynomial Polynomial::monomial(int m, double coeff) {
  std::vector<double> c(static_cast<std::size_t>(m) + 1, 0.0);
  c.back() = coeff;
  return Polynomial(std::move(c));
}

void Polynomial::trim() {
  while (!coeffs_.empty() && std::abs(coeffs_.back()) <= kTrimTolerance) coeffs_.pop_back();
}

double Polynomial::coeff(int m) const {
  if (m < 0 || m > degree()) return 0.0;
  return coeffs_[static_cast<std::size_t>(m)];
}

double Polynomial::eval(double x) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

Polynomial Polynomial::derivative() const {
  if (coeffs_.size() <= 1) return {};
  std::vector<double> d(coeffs_.size() - 1);
  for (std::size_t m = 1; m < coeffs_.size(); ++m) d[m - 1] = static_cast<double>(m) * coeffs_[m];
  return Polynomial(std::move(d));
}

bool Polynomial::has_parity(int parity, double tol) const {
  for (int m = 0; m <= degree(); ++m) {
    if ((m - parity) % 2 != 0 && std::abs(coeff(m)) > tol) return false;
  }
  return true;
}

double Polynomial::max_abs_diff(const Polynomial& other) const {
  double worst = 0.0;
  for (int m = 0; m <= std::max(degree(), other.degree()); ++m) {
    worst = std::max(worst, std::abs(coeff(m) - other.coeff(m)));
  }
  return worst;
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  if (other.coeffs_.size() > coeffs_.size()) coeffs_.resize(other.coeffs_.size(), 0.0);
  for (std::size_t m = 0; m < other.coeffs_.size(); ++m) coeffs_[m] += other.coeffs_[m];
  trim();
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  if (other.coeffs_.size() > coeffs_.size()) coeffs_.resize(other.coeffs_.size(), 0.0);
  for (std::size_t m = 0; m < other.coeffs_.size(); ++m) coeffs_[m] -= other.coeffs_[m];
  trim();
  return *this;
}

Polynomial& Polynomial::operator*=(double scalar) {
  for (auto& c : coeffs_) c *= scalar;
  trim();
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<double> c(a.coeffs_.size() + b.coeffs_.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j) c[i + j] += a.coeffs_[i] * b.coeffs_[j];
  }
  return Polynomial(std::move(c));
}

}  // namespace edgeworth
