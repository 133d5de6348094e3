#pragma once

#include <span>
#include <vector>

#include "indi/loop.hpp"

namespace indi {

/// Closed-loop performance functions. Disturbance enters at the plant input,
/// noise at the sensor output.
struct PerformanceSet {
  TFExpr S;     ///< sensitivity
  TFExpr T_ec;  ///< command -> tracking error (reference model minus measured output)
  TFExpr T_yd;  ///< input disturbance -> plant output
  TFExpr T_yn;  ///< sensor noise -> sensed plant output H y
  TFExpr L_u;
  bool pch = false;
};

/// Builds the set from the block diagram and checks S (1 + L_u) = 1,
/// T_yd = P S and T_yn = S - 1 on a 50-point grid; a residual above 1e-8
/// throws std::logic_error.
PerformanceSet performance_set(const LoopConfig& cfg, const PlantModel& m);

/// Magnitudes with PCH off and on over one grid.
struct PchComparison {
  std::vector<double> omega;
  std::vector<double> S_off, S_on;
  std::vector<double> T_yd_off, T_yd_on;
  std::vector<double> T_yn_off, T_yn_on;
  std::vector<double> L_off, L_on;
  std::vector<double> ratio;  ///< |R(jw)|
  /// |R| <= 1 everywhere when K_p > K_r, >= 1 when K_p < K_r, == 1 when equal.
  bool ratio_bound_holds = false;
  /// |L_on| <= |L_off| (K_p > K_r) or >= (K_p < K_r) at every grid point.
  bool loop_gain_ordered = false;
};

PchComparison pch_performance_delta(const LoopConfig& cfg, const PlantModel& m, std::span<const double> omegas);

}  // namespace indi
