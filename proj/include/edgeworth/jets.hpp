#pragma once

#include <complex>
#include <span>
#include <vector>

namespace edgeworth {

using Complex = std::complex<double>;

/// Truncated power series c_0 + c_1 t + ... + c_s t^s with complex coefficients.
///
/// All binary operations require equal orders; nothing beyond index `order()`
/// is ever read or written.
class Jet {
 public:
  explicit Jet(int order = 0);
  explicit Jet(std::vector<Complex> coeffs);

  static Jet constant(Complex value, int order);
  /// The series of the identity function, t.
  static Jet variable(int order);

  int order() const { return static_cast<int>(coeffs_.size()) - 1; }

  const Complex& operator[](int m) const { return coeffs_[static_cast<std::size_t>(m)]; }
  Complex& operator[](int m) { return coeffs_[static_cast<std::size_t>(m)]; }
  std::span<const Complex> coeffs() const { return coeffs_; }

  /// Horner evaluation of the truncated polynomial.
  Complex eval(Complex t) const;
  /// m-th derivative at t = 0, i.e. m! c_m.
  Complex derivative_at_zero(int m) const;

  /// Same series at a different truncation (padding with zeros when growing).
  Jet truncated(int order) const;

  Jet& operator+=(const Jet& other);
  Jet& operator-=(const Jet& other);
  Jet& operator*=(Complex scalar);

 private:
  std::vector<Complex> coeffs_;
};

Jet jet_add(const Jet& a, const Jet& b);
Jet jet_sub(const Jet& a, const Jet& b);
/// Cauchy product; index pairs (i, m-i) and (m-i, i) are summed together so
/// that jet_mul(a, b) and jet_mul(b, a) agree bit for bit.
Jet jet_mul(const Jet& a, const Jet& b);
/// Throws DivByZeroConstantTerm when |b[0]| <= 1e-300.
Jet jet_div(const Jet& a, const Jet& b);
/// Uses (exp a)' = a' exp a.
Jet jet_exp(const Jet& a);
/// Principal branch at a[0]; throws LogOfZeroConstantTerm when |a[0]| <= 1e-300.
Jet jet_log(const Jet& a);
/// Series of p * exp(i*h*t).
Jet jet_exp_i(double h, double p, int order);

inline Jet operator+(const Jet& a, const Jet& b) { return jet_add(a, b); }
inline Jet operator-(const Jet& a, const Jet& b) { return jet_sub(a, b); }
inline Jet operator*(const Jet& a, const Jet& b) { return jet_mul(a, b); }
inline Jet operator/(const Jet& a, const Jet& b) { return jet_div(a, b); }
Jet operator*(Complex scalar, const Jet& a);

/// Truncated series in two variables: t up to degree t_max, u up to u_max.
/// Products drop every term with t-degree > t_max or u-degree > u_max.
class BivariateSeries {
 public:
  BivariateSeries(int t_max, int u_max);

  int t_max() const { return t_max_; }
  int u_max() const { return u_max_; }

  Complex& at(int m, int k) { return coeffs_[index(m, k)]; }
  const Complex& at(int m, int k) const { return coeffs_[index(m, k)]; }

  /// The coefficient of u^k as a series in t of order t_max.
  Jet u_slice(int k) const;
  void set_u_slice(int k, const Jet& slice);

  /// Substitutes a concrete u and returns the resulting series in t.
  Jet eval_u(Complex u) const;

  BivariateSeries& operator+=(const BivariateSeries& other);
  BivariateSeries& operator*=(Complex scalar);
  friend BivariateSeries operator*(const BivariateSeries& a, const BivariateSeries& b);
  friend BivariateSeries operator+(BivariateSeries a, const BivariateSeries& b) { return a += b; }

 private:
  std::size_t index(int m, int k) const {
    return static_cast<std::size_t>(k) * static_cast<std::size_t>(t_max_ + 1) + static_cast<std::size_t>(m);
  }

  int t_max_;
  int u_max_;
  std::vector<Complex> coeffs_;
};

/// Truncated exponential. Graded by u: k E_k = sum_{j=1..k} j s_j E_{k-j},
/// with E_0 = exp(s_0) as a series in t.
BivariateSeries bi_exp(const BivariateSeries& s);

/// Real polynomial sum_m c_m x^m. Trailing coefficients with |c| <= 1e-14 are trimmed.
class Polynomial {
 public:
  static constexpr double kTrimTolerance = 1e-14;

  Polynomial() = default;
  explicit Polynomial(std::vector<double> coeffs);

  static Polynomial constant(double value) { return Polynomial({value}); }
  /// x^m
  static Polynomial monomial(int m, double coeff = 1.0);

  /// -1 for the zero polynomial.
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  double coeff(int m) const;
  std::span<const double> coeffs() const { return coeffs_; }

  double eval(double x) const;
  Polynomial derivative() const;
  /// True when every coefficient of degree not congruent to `parity` mod 2 is
  /// at most `tol` in absolute value.
  bool has_parity(int parity, double tol) const;
  /// max_m |c_m - other.c_m|
  double max_abs_diff(const Polynomial& other) const;

  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(double scalar);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);

 private:
  void trim();
  std::vector<double> coeffs_;
};

}  // namespace edgeworth
