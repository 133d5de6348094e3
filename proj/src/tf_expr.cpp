#include "indi/tf_expr.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "indi/errors.hpp"

namespace indi {

struct TFExpr::Node {
  Kind kind = Kind::scale;
  Rational atom{1.0};
  double value = 1.0;  // delay time or scale factor
  std::vector<TFExpr> children;
};

Rational pade2(double tau) {
  if (!(tau >= 0.0)) throw std::domain_error("pade2: delay must be non-negative");
  if (tau == 0.0) return Rational(1.0);
  return {Polynomial{12.0, -6.0 * tau, tau * tau}, Polynomial{12.0, 6.0 * tau, tau * tau}};
}

TFExpr::TFExpr() : TFExpr(1.0) {}

TFExpr::TFExpr(Rational r) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::rational;
  n->atom = std::move(r);
  node_ = std::move(n);
}

TFExpr::TFExpr(double k) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::scale;
  n->value = k;
  node_ = std::move(n);
}

TFExpr TFExpr::delay(double tau) {
  if (!(tau >= 0.0)) throw std::domain_error("delay must be non-negative");
  auto n = std::make_shared<Node>();
  n->kind = Kind::delay;
  n->value = tau;
  return TFExpr(std::shared_ptr<const Node>(std::move(n)));
}

TFExpr TFExpr::sum(std::vector<TFExpr> terms) {
  if (terms.empty()) return TFExpr(0.0);
  if (terms.size() == 1) return terms.front();
  auto n = std::make_shared<Node>();
  n->kind = Kind::sum;
  n->children = std::move(terms);
  return TFExpr(std::shared_ptr<const Node>(std::move(n)));
}

TFExpr TFExpr::product(std::vector<TFExpr> factors) {
  if (factors.empty()) return TFExpr(1.0);
  if (factors.size() == 1) return factors.front();
  auto n = std::make_shared<Node>();
  n->kind = Kind::product;
  n->children = std::move(factors);
  return TFExpr(std::shared_ptr<const Node>(std::move(n)));
}

TFExpr TFExpr::feedback(TFExpr forward, TFExpr loop) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::feedback;
  n->children = {std::move(forward), std::move(loop)};
  return TFExpr(std::shared_ptr<const Node>(std::move(n)));
}

TFExpr::Kind TFExpr::kind() const noexcept { return node_->kind; }

const Rational& TFExpr::as_rational() const {
  if (node_->kind != Kind::rational) throw std::logic_error("TFExpr: not a rational atom");
  return node_->atom;
}

double TFExpr::delay_time() const {
  if (node_->kind != Kind::delay) throw std::logic_error("TFExpr: not a delay");
  return node_->value;
}

double TFExpr::scale_value() const {
  if (node_->kind != Kind::scale) throw std::logic_error("TFExpr: not a scale");
  return node_->value;
}

const std::vector<TFExpr>& TFExpr::children() const noexcept { return node_->children; }

TFExpr operator*(const TFExpr& a, const TFExpr& b) {
  std::vector<TFExpr> f;
  for (const auto* e : {&a, &b}) {
    if (e->kind() == TFExpr::Kind::product)
      f.insert(f.end(), e->children().begin(), e->children().end());
    else
      f.push_back(*e);
  }
  return TFExpr::product(std::move(f));
}

TFExpr operator+(const TFExpr& a, const TFExpr& b) {
  std::vector<TFExpr> t;
  for (const auto* e : {&a, &b}) {
    if (e->kind() == TFExpr::Kind::sum)
      t.insert(t.end(), e->children().begin(), e->children().end());
    else
      t.push_back(*e);
  }
  return TFExpr::sum(std::move(t));
}

TFExpr operator-(const TFExpr& a) { return TFExpr::scale(-1.0) * a; }
TFExpr operator-(const TFExpr& a, const TFExpr& b) { return a + (-b); }

TFExpr reciprocal(const TFExpr& x) { return TFExpr::feedback(TFExpr(1.0), x - TFExpr(1.0)); }

std::complex<double> evaluate(const TFExpr& expr, std::complex<double> s) {
  using K = TFExpr::Kind;
  switch (expr.kind()) {
    case K::rational:
      return expr.as_rational()(s);
    case K::delay:
      return std::exp(-s * expr.delay_time());
    case K::scale:
      return expr.scale_value();
    case K::sum: {
      std::complex<double> acc = 0.0;
      for (const auto& c : expr.children()) acc += evaluate(c, s);
      return acc;
    }
    case K::product: {
      std::complex<double> acc = 1.0;
      for (const auto& c : expr.children()) acc *= evaluate(c, s);
      return acc;
    }
    case K::feedback: {
      const auto g = evaluate(expr.children()[0], s);
      const auto h = evaluate(expr.children()[1], s);
      const auto ret = 1.0 + g * h;
      constexpr double eps = std::numeric_limits<double>::epsilon();
      if (std::abs(ret) <= 4.0 * eps * (1.0 + std::abs(g * h)))
        throw SingularEvaluation("feedback loop with vanishing return difference", s.imag());
      return g / ret;
    }
  }
  return 0.0;
}

std::complex<double> eval_exact(const TFExpr& expr, double omega) {
  return evaluate(expr, {0.0, omega});
}

Rational rationalize(const TFExpr& expr) {
  using K = TFExpr::Kind;
  switch (expr.kind()) {
    case K::rational:
      return expr.as_rational();
    case K::delay:
      return pade2(expr.delay_time());
    case K::scale:
      return Rational(expr.scale_value());
    case K::sum: {
      Rational acc(0.0);
      for (const auto& c : expr.children()) acc += rationalize(c);
      return acc;
    }
    case K::product: {
      Rational acc(1.0);
      for (const auto& c : expr.children()) acc *= rationalize(c);
      return acc;
    }
    case K::feedback: {
      // (a/b) / (1 + (a/b)(c/d)) = a d / (b d + a c)
      const Rational g = rationalize(expr.children()[0]);
      const Rational h = rationalize(expr.children()[1]);
      const auto& a = g.numerator();
      const auto& b = g.denominator();
      const auto& c = h.numerator();
      const auto& d = h.denominator();
      Polynomial den = b * d + a * c;
      if (den.is_zero()) throw SingularStructure("feedback loop whose return difference is identically zero");
      return {a * d, std::move(den)};
    }
  }
  return Rational(0.0);
}

double total_delay(const TFExpr& expr) {
  if (expr.kind() == TFExpr::Kind::delay) return expr.delay_time();
  double acc = 0.0;
  for (const auto& c : expr.children()) acc += total_delay(c);
  return acc;
}

bool has_delay(const TFExpr& expr) {
  if (expr.kind() == TFExpr::Kind::delay) return expr.delay_time() > 0.0;
  for (const auto& c : expr.children())
    if (has_delay(c)) return true;
  return false;
}

}  // namespace indi
