#pragma once

#include "indi/blocks.hpp"
#include "indi/plant.hpp"
#include "indi/tf_expr.hpp"

namespace indi {

/// Transfer functions of one loop configuration.
struct LoopSet {
  TFExpr C_bar;  ///< equivalent controller from measured output to u_c
  TFExpr L_u;    ///< open loop broken at the plant input
  TFExpr T_yc;   ///< command -> plant output
  TFExpr T_ymc;  ///< command -> measured output
  bool pch = false;
};

/// C_bar = k/B_hat * (K_p + s F) / (1 - Ga Gam), times pch_ratio when PCH is on.
/// Throws SingularStructure when 1 - Ga Gam vanishes identically.
TFExpr equivalent_controller(const LoopConfig& cfg);

/// L_u = Ga C_bar H P.
TFExpr open_loop(const LoopConfig& cfg, const PlantModel& m);

/// Same loop with the actuator delay folded into two path delays:
/// sensor path tau1 (replaces tau_a + tau_s) and measurement path tau2
/// (replaces tau_a + tau_am).
TFExpr open_loop_path_delays(const LoopConfig& cfg, const PlantModel& m, double tau1, double tau2);

LoopSet closed_loop(const LoopConfig& cfg, const PlantModel& m);

/// K_r/(s + K_r) * (K_p + s)/(K_p + s F): shapes the command before the loop.
TFExpr command_prefilter(const LoopConfig& cfg);

struct PidGains {
  double C_P = 0.0;
  double C_I = 0.0;
  double C_D = 0.0;
};

/// PID form of the equivalent controller in the ideal case (unity sensor,
/// filter and measurement path, first-order actuator, no PCH).
/// Throws std::invalid_argument for any other configuration.
PidGains pid_reduction(const LoopConfig& cfg);

/// Low-pass lag equivalent of a synchronized delay tau1.
Rational gamma1(double tau1, double T_act);
/// Same for asynchronous sensor-path delay tau1 and measurement-path delay tau2.
Rational gamma2(double tau1, double tau2, double T_act);

/// L_u with PCH divided by L_u without: (s + K_r) / (s + K_r + k (K_p - K_r)).
Rational pch_ratio(const LoopConfig& cfg);

}  // namespace indi
