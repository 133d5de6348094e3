#pragma once

#include <complex>
#include <initializer_list>
#include <span>
#include <vector>

namespace indi {

/// Real polynomial in s, coefficients stored in ascending powers.
/// Trailing (highest-power) zeros are trimmed, so the zero polynomial is {0}.
class Polynomial {
 public:
  Polynomial() : coeffs_{0.0} {}
  Polynomial(std::initializer_list<double> ascending);
  explicit Polynomial(std::vector<double> ascending);

  static Polynomial constant(double c) { return Polynomial{c}; }
  /// c0 + c1*s
  static Polynomial linear(double c0, double c1) { return Polynomial{c0, c1}; }

  int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const noexcept { return coeffs_.size() == 1 && coeffs_[0] == 0.0; }
  std::span<const double> coefficients() const noexcept { return coeffs_; }
  /// Coefficient of s^power; zero beyond the degree.
  double operator[](int power) const noexcept;
  double leading() const noexcept { return coeffs_.back(); }
  double max_abs_coefficient() const noexcept;

  std::complex<double> operator()(std::complex<double> s) const noexcept;
  double operator()(double s) const noexcept;

  Polynomial derivative() const;

  Polynomial operator-() const;
  Polynomial& operator+=(const Polynomial& rhs);
  Polynomial& operator-=(const Polynomial& rhs);
  Polynomial& operator*=(const Polynomial& rhs);
  Polynomial& operator*=(double k);

  friend bool operator==(const Polynomial&, const Polynomial&) = default;

 private:
  void trim();
  std::vector<double> coeffs_;
};

inline Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
inline Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
inline Polynomial operator*(Polynomial a, const Polynomial& b) { return a *= b; }
inline Polynomial operator*(Polynomial a, double k) { return a *= k; }
inline Polynomial operator*(double k, Polynomial a) { return a *= k; }

/// Ratio of two polynomials. The denominator is never the zero polynomial.
class Rational {
 public:
  Rational(double c = 1.0) : num_(Polynomial::constant(c)), den_(Polynomial::constant(1.0)) {}  // NOLINT
  explicit Rational(Polynomial num) : num_(std::move(num)), den_(Polynomial::constant(1.0)) {}
  Rational(Polynomial num, Polynomial den);

  const Polynomial& numerator() const noexcept { return num_; }
  const Polynomial& denominator() const noexcept { return den_; }

  /// Throws SingularEvaluation when the denominator vanishes at s.
  std::complex<double> operator()(std::complex<double> s) const;

  Rational operator-() const { return {-num_, den_}; }
  Rational& operator+=(const Rational& rhs);
  Rational& operator-=(const Rational& rhs) { return *this += -rhs; }
  Rational& operator*=(const Rational& rhs);
  Rational& operator/=(const Rational& rhs);

 private:
  Polynomial num_;
  Polynomial den_;
};

inline Rational operator+(Rational a, const Rational& b) { return a += b; }
inline Rational operator-(Rational a, const Rational& b) { return a -= b; }
inline Rational operator*(Rational a, const Rational& b) { return a *= b; }
inline Rational operator/(Rational a, const Rational& b) { return a /= b; }

}  // namespace indi
