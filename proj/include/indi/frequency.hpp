#pragma once

#include <complex>
#include <span>
#include <vector>

#include "indi/tf_expr.hpp"

namespace indi {

struct FrequencyResponse {
  std::vector<double> omega;                 ///< rad/s, strictly increasing
  std::vector<std::complex<double>> value;
  std::vector<double> phase;                 ///< unwrapped, rad

  size_t size() const noexcept { return omega.size(); }
  double magnitude(size_t i) const { return std::abs(value[i]); }
  double magnitude_db(size_t i) const;
  double phase_deg(size_t i) const;
};

/// n log-spaced points over [lo, hi], endpoints included.
std::vector<double> log_space(double lo, double hi, size_t n);

/// Element-wise eval_exact with continuous phase. Evaluation runs in an
/// OpenMP parallel loop; unwrapping inserts extra samples wherever the
/// phase moves by more than pi/4 between neighbours.
FrequencyResponse freq_response(const TFExpr& expr, std::span<const double> omegas);
/// Single-threaded reference for freq_response (same result bit for bit).
FrequencyResponse freq_response_serial(const TFExpr& expr, std::span<const double> omegas);

/// Dense phase trace: every requested frequency plus the refinement points.
struct PhaseSample {
  double omega;
  std::complex<double> value;
  double phase;
};
std::vector<PhaseSample> phase_track(const TFExpr& expr, std::span<const double> omegas,
                                     std::span<const std::complex<double>> values);

/// Phase at omega, continued from a neighbouring sample less than pi/4 away.
double phase_near(const PhaseSample& anchor, std::complex<double> value);

}  // namespace indi
