#include "indi/performance.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "indi/frequency.hpp"

namespace indi {
namespace {

constexpr double kIdentityTolerance = 1e-8;

double rel(std::complex<double> lhs, std::complex<double> rhs) {
  return std::abs(lhs - rhs) / (1.0 + std::abs(rhs));
}

void check_identities(const PerformanceSet& p, const TFExpr& P) {
  for (double w : log_space(1e-2, 1e3, 50)) {
    const auto L = eval_exact(p.L_u, w);
    const auto S = eval_exact(p.S, w);
    const double r1 = rel(S * (1.0 + L), 1.0);
    const double r2 = rel(eval_exact(p.T_yd, w), eval_exact(P, w) * S);
    const double r3 = rel(eval_exact(p.T_yn, w), S - 1.0);
    const double worst = std::max({r1, r2, r3});
    if (!(worst <= kIdentityTolerance))
      throw std::logic_error(fmt::format("performance identities broken at w = {} rad/s (residual {:.3e})", w, worst));
  }
}

}  // namespace

PerformanceSet performance_set(const LoopConfig& cfg, const PlantModel& m) {
  const LoopSet loops = closed_loop(cfg, m);
  const auto b = block_tfs(cfg);
  const TFExpr P(plant_tf(m));
  const double k = cfg.allocation_scale();
  const TFExpr s(Rational(Polynomial{0.0, 1.0}));
  const TFExpr Q = TFExpr(cfg.K_p) + s * b.F;
  const TFExpr W = TFExpr(1.0) - b.Ga * b.Gam;

  PerformanceSet p;
  p.pch = cfg.pch;
  p.L_u = loops.L_u;

  // Return-difference form: S = B_hat D_r W / (B_hat D_r W + k Ga (s + K_r) Q H P),
  // with D_r = s + K_r + k (K_p - K_r) when PCH is on, D_r = s + K_r otherwise.
  const double dr0 = cfg.pch ? cfg.K_r + k * (cfg.K_p - cfg.K_r) : cfg.K_r;
  const TFExpr hedge(Rational(Polynomial{dr0, 1.0}));
  const TFExpr ref(Rational(Polynomial{cfg.K_r, 1.0}));
  const TFExpr N = TFExpr(cfg.B_hat) * hedge * W;
  p.S = N * reciprocal(N + TFExpr(k) * b.Ga * ref * Q * b.H * P);

  const TFExpr C = loops.C_bar;
  p.T_yd = TFExpr::feedback(P, b.Ga * C * b.H);
  p.T_yn = b.H * TFExpr::feedback(-(P * b.Ga * C), -b.H);
  p.T_ec = TFExpr(Rational(Polynomial{cfg.K_r}, Polynomial{cfg.K_r, 1.0})) - loops.T_ymc;

  check_identities(p, P);
  return p;
}

PchComparison pch_performance_delta(const LoopConfig& cfg, const PlantModel& m, std::span<const double> omegas) {
  LoopConfig off = cfg, on = cfg;
  off.pch = false;
  on.pch = true;
  const auto a = performance_set(off, m);
  const auto b = performance_set(on, m);
  const Rational R = pch_ratio(cfg);

  PchComparison c;
  c.omega.assign(omegas.begin(), omegas.end());
  c.ratio_bound_holds = true;
  c.loop_gain_ordered = true;
  const double dir = cfg.K_p > cfg.K_r ? 1.0 : (cfg.K_p < cfg.K_r ? -1.0 : 0.0);
  for (double w : omegas) {
    const std::complex<double> jw(0.0, w);
    c.S_off.push_back(std::abs(eval_exact(a.S, w)));
    c.S_on.push_back(std::abs(eval_exact(b.S, w)));
    c.T_yd_off.push_back(std::abs(eval_exact(a.T_yd, w)));
    c.T_yd_on.push_back(std::abs(eval_exact(b.T_yd, w)));
    c.T_yn_off.push_back(std::abs(eval_exact(a.T_yn, w)));
    c.T_yn_on.push_back(std::abs(eval_exact(b.T_yn, w)));
    c.L_off.push_back(std::abs(eval_exact(a.L_u, w)));
    c.L_on.push_back(std::abs(eval_exact(b.L_u, w)));
    const double r = std::abs(R(jw));
    c.ratio.push_back(r);
    constexpr double slack = 1e-12;
    if (dir > 0.0) {
      c.ratio_bound_holds = c.ratio_bound_holds && r <= 1.0 + slack;
      c.loop_gain_ordered = c.loop_gain_ordered && c.L_on.back() <= c.L_off.back() * (1.0 + slack);
    } else if (dir < 0.0) {
      c.ratio_bound_holds = c.ratio_bound_holds && r >= 1.0 - slack;
      c.loop_gain_ordered = c.loop_gain_ordered && c.L_on.back() >= c.L_off.back() * (1.0 - slack);
    } else {
      c.ratio_bound_holds = c.ratio_bound_holds && std::abs(r - 1.0) <= slack;
      c.loop_gain_ordered = c.loop_gain_ordered && std::abs(c.L_on.back() - c.L_off.back()) <= slack * c.L_off.back();
    }
  }
  return c;
}

}  // namespace indi
