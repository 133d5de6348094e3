#include "indi/loop.hpp"

#include <stdexcept>

#include "indi/errors.hpp"

namespace indi {
namespace {

TFExpr error_dynamics(const LoopConfig& cfg, const TFExpr& F) {
  return TFExpr(Rational(cfg.K_p)) + TFExpr(Rational(Polynomial{0.0, 1.0})) * F;
}

double controller_gain(const LoopConfig& cfg) {
  const double k = cfg.allocation_scale();
  if (k == 0.0) throw SingularStructure("allocation scale T_act*K_v is zero");
  return k / cfg.B_hat;
}

// 1 / (1 - Ga Gam), refusing the degenerate ideal case.
TFExpr inner_inverse(const TFExpr& Ga, const TFExpr& Gam) {
  const TFExpr loop = -(Ga * Gam);
  if (rationalize(TFExpr(1.0) + loop).numerator().is_zero())
    throw SingularStructure("1 - Ga*Gam is identically zero (no actuator lag and no delay)");
  return TFExpr::feedback(TFExpr(1.0), loop);
}

TFExpr controller_from_blocks(const LoopConfig& cfg, const LoopBlocks& b) {
  TFExpr c = TFExpr::scale(controller_gain(cfg)) * error_dynamics(cfg, b.F) * inner_inverse(b.Ga, b.Gam);
  if (cfg.pch) c = c * TFExpr(pch_ratio(cfg));
  return c;
}

}  // namespace

TFExpr equivalent_controller(const LoopConfig& cfg) {
  cfg.validate();
  return controller_from_blocks(cfg, block_tfs(cfg));
}

TFExpr open_loop(const LoopConfig& cfg, const PlantModel& m) {
  cfg.validate();
  const auto b = block_tfs(cfg);
  return b.Ga * controller_from_blocks(cfg, b) * b.H * TFExpr(plant_tf(m));
}

TFExpr open_loop_path_delays(const LoopConfig& cfg, const PlantModel& m, double tau1, double tau2) {
  LoopConfig c = cfg;
  c.tau_a = 0.0;
  c.tau_s = tau1;
  c.tau_am = tau2;
  return open_loop(c, m);
}

TFExpr command_prefilter(const LoopConfig& cfg) {
  const auto b = block_tfs(cfg);
  const TFExpr ref(Rational(Polynomial{cfg.K_r}, Polynomial{cfg.K_r, 1.0}));
  return ref * TFExpr(Rational(Polynomial{cfg.K_p, 1.0}, Polynomial{1.0})) * reciprocal(error_dynamics(cfg, b.F));
}

LoopSet closed_loop(const LoopConfig& cfg, const PlantModel& m) {
  cfg.validate();
  const auto b = block_tfs(cfg);
  const TFExpr P(plant_tf(m));
  LoopSet s;
  s.pch = cfg.pch;
  s.C_bar = controller_from_blocks(cfg, b);
  s.L_u = b.Ga * s.C_bar * b.H * P;
  s.T_yc = command_prefilter(cfg) * TFExpr::feedback(b.Ga * s.C_bar * P, b.H);
  s.T_ymc = b.H * s.T_yc;
  return s;
}

PidGains pid_reduction(const LoopConfig& cfg) {
  cfg.validate();
  if (cfg.T_act <= 0.0) throw std::invalid_argument("pid_reduction: needs a first-order actuator (T_act > 0)");
  if (cfg.tau_a != 0.0 || cfg.tau_s != 0.0 || cfg.tau_am != 0.0 || cfg.T_sensor != 0.0 || cfg.T_diff != 0.0)
    throw std::invalid_argument("pid_reduction: only defined for the ideal loop (no delays, no sensor or filter lag)");
  if (cfg.pch) throw std::invalid_argument("pid_reduction: PCH adds reference-model dynamics; not a PID");
  const double g = controller_gain(cfg);
  return {g * (cfg.K_p * cfg.T_act + 1.0) / cfg.T_act, g * cfg.K_p / cfg.T_act, g};
}

Rational gamma1(double tau1, double T_act) { return gamma2(tau1, tau1, T_act); }

Rational gamma2(double tau1, double tau2, double T_act) {
  if (!(tau1 >= 0.0) || !(tau2 >= 0.0)) throw std::domain_error("gamma: delays must be non-negative");
  if (!(T_act > 0.0)) throw std::domain_error("gamma: T_act must be positive");
  const Polynomial lead1{12.0, -6.0 * tau1, tau1 * tau1};
  const Polynomial lag1{12.0, 6.0 * tau1, tau1 * tau1};
  const Polynomial lag2{12.0, 6.0 * tau2, tau2 * tau2};
  const Polynomial act2{12.0 + 12.0 * tau2 / T_act, 6.0 * tau2, tau2 * tau2};
  if (tau1 == tau2) return {lead1, act2};
  return {lead1 * lag2, lag1 * act2};
}

Rational pch_ratio(const LoopConfig& cfg) {
  const double k = cfg.allocation_scale();
  return {Polynomial{cfg.K_r, 1.0}, Polynomial{cfg.K_r + k * (cfg.K_p - cfg.K_r), 1.0}};
}

}  // namespace indi
