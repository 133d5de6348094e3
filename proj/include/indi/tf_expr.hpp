#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "indi/polynomial.hpp"

namespace indi {

/// Second-order Padé approximant of exp(-tau*s):
/// (12 - 6 tau s + (tau s)^2) / (12 + 6 tau s + (tau s)^2). tau = 0 gives 1.
Rational pade2(double tau);

/// Composable transfer-function expression. Immutable; copies share nodes.
///
/// Delay nodes keep the exact exp(-j w tau) response; `rationalize` replaces
/// each of them by `pade2` when a polynomial form is needed.
class TFExpr {
 public:
  enum class Kind { rational, delay, scale, sum, product, feedback };

  /// Constant 1.
  TFExpr();
  TFExpr(Rational r);  // NOLINT: rational atoms convert implicitly
  TFExpr(double k);    // NOLINT: scale leaf

  static TFExpr rational(Rational r) { return TFExpr(std::move(r)); }
  static TFExpr delay(double tau);
  static TFExpr scale(double k) { return TFExpr(k); }
  static TFExpr sum(std::vector<TFExpr> terms);
  static TFExpr product(std::vector<TFExpr> factors);
  /// forward / (1 + forward * loop)
  static TFExpr feedback(TFExpr forward, TFExpr loop);

  Kind kind() const noexcept;
  const Rational& as_rational() const;
  double delay_time() const;
  double scale_value() const;
  const std::vector<TFExpr>& children() const noexcept;

 private:
  struct Node;
  explicit TFExpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

TFExpr operator*(const TFExpr& a, const TFExpr& b);
TFExpr operator+(const TFExpr& a, const TFExpr& b);
TFExpr operator-(const TFExpr& a, const TFExpr& b);
TFExpr operator-(const TFExpr& a);
/// 1 / x, expressed as feedback(1, x - 1).
TFExpr reciprocal(const TFExpr& x);

/// Exact evaluation at an arbitrary complex s (delays as exp(-s tau)).
std::complex<double> evaluate(const TFExpr& expr, std::complex<double> s);
/// Exact evaluation at s = j*omega. Throws SingularEvaluation carrying omega.
std::complex<double> eval_exact(const TFExpr& expr, double omega);

/// Collapses the tree to a single rational function, Padé-2 for every delay.
/// No common-factor cancellation is attempted.
Rational rationalize(const TFExpr& expr);

/// Sum of all delay times in the tree (bounds the delay part of the phase slope).
double total_delay(const TFExpr& expr);
bool has_delay(const TFExpr& expr);

}  // namespace indi
