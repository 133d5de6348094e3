#pragma once

#include <limits>
#include <span>
#include <vector>

#include "indi/loop.hpp"
#include "indi/polynomial.hpp"

namespace indi {

struct FrequencyBand {
  double lo = 1e-3;  ///< rad/s
  double hi = 1e4;
};

struct MarginReport {
  double gain_margin = std::numeric_limits<double>::infinity();  ///< ratio
  double phase_margin = std::numeric_limits<double>::quiet_NaN();  ///< deg, wrapped to (-180, 180]
  double time_delay_margin = std::numeric_limits<double>::quiet_NaN();  ///< s
  double gain_crossover = std::numeric_limits<double>::quiet_NaN();  ///< rad/s, crossover behind the TDM
  std::vector<double> gain_crossovers;
  std::vector<double> phase_crossovers;

  bool has_gain_crossover() const noexcept { return !gain_crossovers.empty(); }
  double gain_margin_db() const;
};

/// Margins of the open loop L over the band. The scan uses `points`
/// log-spaced frequencies, refined wherever the phase moves fast, then
/// bisects each crossing. Every gain crossover yields PM_i and
/// TDM_i = PM_i / w_i; the report keeps the one with the smallest TDM.
MarginReport margins(const TFExpr& loop, FrequencyBand band = {}, size_t points = 801);

/// Ideal roll loop in closed form. effectiveness_ratio = B_hat / L_da.
MarginReport roll_margins_closed_form(double K_p, double K_v, double L_p, double effectiveness_ratio = 1.0);

/// Closed-loop characteristic polynomial with a synchronized delay tau1 on
/// both paths (Padé-2), ideal sensor and filter. Requires B_hat == CB.
/// tau1 = 0 returns the delay-free polynomial s*D(s) + K_v (K_p + s) N(s)/B_hat.
Polynomial sync_delay_char_poly(const LoopConfig& cfg, const PlantModel& m, double tau1);

/// Coefficient-positivity bound on tau1 for the roll loop; +inf when
/// K_p K_v <= -2 L_p / T_act.
double sync_delay_bound(double K_p, double K_v, double L_p, double T_act);

/// Smallest synchronized delay at which sync_delay_char_poly loses Routh
/// stability, found by scanning [0, tau_max] then bisecting. 0 when the
/// delay-free loop is already unstable, +inf when no crossing is found.
double sync_delay_limit(const LoopConfig& cfg, const PlantModel& m, double tau_max = 2.0);

/// num + den of rationalize(loop): roots are the closed-loop poles of 1/(1 + L).
Polynomial loop_characteristic_polynomial(const TFExpr& loop);

/// Largest root real part of the characteristic polynomial below which a
/// loop counts as stable.
inline constexpr double kStabilityGuard = -1e-9;

enum class CellVerdict { stable, unstable, indeterminate };

struct StabilityGrid {
  std::vector<double> tau1;  ///< rows: sensor-path delay, s
  std::vector<double> tau2;  ///< columns: measurement-path delay, s
  std::vector<CellVerdict> verdict;  ///< row-major
  std::vector<double> max_real_part;  ///< NaN for indeterminate cells

  CellVerdict at(size_t row, size_t col) const { return verdict[row * tau2.size() + col]; }
  double max_real_at(size_t row, size_t col) const { return max_real_part[row * tau2.size() + col]; }
  size_t stable_count() const;
};

/// Stability over (tau1, tau2) with the actuator delay folded into both
/// path delays. Cells run in parallel and merge by index.
StabilityGrid delay_stability_grid(const LoopConfig& cfg, const PlantModel& m, std::span<const double> tau1s,
                                   std::span<const double> tau2s);
StabilityGrid delay_stability_grid_serial(const LoopConfig& cfg, const PlantModel& m, std::span<const double> tau1s,
                                          std::span<const double> tau2s);

struct OrderingViolation {
  double omega;
  double first;  ///< |L_u1|, or arg L_u1 in deg for the phase chain
  double second;
  double third;
};

/// Loop variants without compensation, with filter compensation, and with
/// filter and sensor compensation.
struct CompensationReport {
  MarginReport variant[3];
  std::vector<OrderingViolation> magnitude_violations;  ///< |L1| > |L2| > |L3| broken
  std::vector<OrderingViolation> phase_violations;      ///< arg L3 > arg L2 > arg L1 broken
  bool gm_nondecreasing = false;
  bool pm_nondecreasing = false;
  bool tdm_nondecreasing = false;
};

/// Requires T_sensor > 0 and T_diff > 0.
CompensationReport compensation_compare(const LoopConfig& cfg, const PlantModel& m, std::span<const double> omegas,
                                        FrequencyBand band = {});

}  // namespace indi
