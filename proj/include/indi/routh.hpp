#pragma once

#include <vector>

#include "indi/polynomial.hpp"

namespace indi {

struct RouthResult {
  bool stable = false;
  std::vector<double> first_column;
  /// A zero pivot was replaced by epsilon, or a zero row by the derivative of
  /// the auxiliary polynomial. Such polynomials have roots on or right of the
  /// imaginary axis, so `stable` is false whenever this is set.
  bool boundary_suspect = false;
};

/// Routh–Hurwitz test. The sign of p is normalized so the leading
/// coefficient is positive; stable iff every first-column entry > tolerance.
RouthResult routh_stable(const Polynomial& p, double tolerance = 0.0);

}  // namespace indi
