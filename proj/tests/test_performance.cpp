#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "indi/frequency.hpp"
#include "indi/performance.hpp"
#include "indi/plant.hpp"

using namespace indi;
using cd = std::complex<double>;

namespace {

LoopConfig desk_loop() {
  LoopConfig c;
  c.K_p = 8.0;
  c.K_v = 20.0;
  c.K_r = 5.0;
  c.T_act = 0.02;
  c.tau_a = 0.005;
  c.T_sensor = 0.01;
  c.tau_s = 0.01;
  c.T_diff = 1.0 / 30.0;
  c.B_hat = -12.0;
  c.comp_filter = true;
  c.comp_sensor = true;
  return c;
}

PlantModel desk_plant() { return make_short_period(-1.2, -0.1, -8.0, -1.5, -12.0); }

PlantModel scaled(const PlantModel& m, double factor) {
  return make_plant(m.A, m.B * factor, m.C, "scaled");
}

double rel(cd a, cd b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("identity suite") {
  const auto m = desk_plant();
  const TFExpr P(plant_tf(m));
  for (bool pch : {false, true})
    for (double K_r : {3.0, 8.0, 12.0}) {
      LoopConfig cfg = desk_loop();
      cfg.pch = pch;
      cfg.K_r = K_r;
      const auto p = performance_set(cfg, m);
      CHECK(p.pch == pch);
      for (double w : log_space(1e-2, 1e3, 100)) {
        const cd L = eval_exact(p.L_u, w), S = eval_exact(p.S, w), Tn = eval_exact(p.T_yn, w);
        CHECK(rel(S * (1.0 + L), 1.0) < 1e-10);
        CHECK(rel(eval_exact(p.T_yd, w), eval_exact(P, w) * S) < 1e-10);
        CHECK(rel(Tn, S - 1.0) < 1e-10);
        CHECK(rel(Tn, -L / (1.0 + L)) < 1e-10);
        CHECK(std::abs(Tn) + std::abs(S) >= 1.0 - 1e-12);
      }
    }
}

TEST_CASE("large K_v limit") {
  LoopConfig cfg = desk_loop();
  cfg.tau_a = cfg.tau_s = 0.0;
  cfg.T_sensor = 0.0;
  cfg.K_v = 1e6;
  const auto p = performance_set(cfg, desk_plant());
  CHECK(std::abs(eval_exact(p.S, 1.0)) < 1e-3);
  CHECK(std::abs(eval_exact(p.T_yn, 1.0)) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("tracking error vanishes at DC") {
  for (bool pch : {false, true}) {
    LoopConfig cfg = desk_loop();
    cfg.pch = pch;
    const auto p = performance_set(cfg, desk_plant());
    CHECK(std::abs(eval_exact(p.T_ec, 1e-7)) < 1e-5);
    CHECK(std::abs(eval_exact(p.T_ec, 1e-9)) < 1e-7);
  }
}

TEST_CASE("finite-difference sensitivity") {
  const auto m = desk_plant();
  for (bool pch : {false, true}) {
    LoopConfig cfg = desk_loop();
    cfg.pch = pch;
    const auto p = performance_set(cfg, m);
    const auto T0 = closed_loop(cfg, m).T_yc;
    for (double w : {1.0, 10.0}) {
      const cd S = eval_exact(p.S, w);
      auto estimate = [&](double h) {
        const auto T1 = closed_loop(cfg, scaled(m, 1.0 + h)).T_yc;
        const cd t0 = eval_exact(T0, w);
        return (eval_exact(T1, w) - t0) / t0 / h;
      };
      const double e1 = std::abs(estimate(0.01) - S);
      const double e2 = std::abs(estimate(0.005) - S);
      CHECK(e1 < 0.02 * std::abs(S));
      CHECK(e2 / e1 == doctest::Approx(0.5).epsilon(0.2));
    }
  }
}

TEST_CASE("PCH comparison") {
  const auto m = desk_plant();
  const auto omegas = log_space(1e-2, 1e3, 200);

  LoopConfig eq = desk_loop();
  eq.K_r = eq.K_p;
  const auto same = pch_performance_delta(eq, m, omegas);
  CHECK(same.ratio_bound_holds);
  CHECK(same.loop_gain_ordered);
  for (size_t i = 0; i < omegas.size(); ++i) {
    CHECK(std::abs(same.S_on[i] - same.S_off[i]) <= 1e-12 * same.S_off[i]);
    CHECK(std::abs(same.T_yd_on[i] - same.T_yd_off[i]) <= 1e-12 * same.T_yd_off[i]);
    CHECK(std::abs(same.T_yn_on[i] - same.T_yn_off[i]) <= 1e-12 * same.T_yn_off[i]);
  }

  LoopConfig hi = desk_loop();
  hi.K_p = 8.0;
  hi.K_r = 4.0;
  hi.K_v = 1.0 / hi.T_act;
  const auto a = pch_performance_delta(hi, m, omegas);
  CHECK(a.ratio_bound_holds);
  CHECK(a.loop_gain_ordered);
  for (size_t i = 0; i < omegas.size(); ++i) {
    const cd s{0.0, omegas[i]};
    CHECK(std::abs(s + 4.0) / std::abs(s + 4.0 + (8.0 - 4.0)) == doctest::Approx(a.ratio[i]).epsilon(1e-12));
    CHECK(a.L_on[i] <= a.L_off[i]);
  }

  LoopConfig lo = hi;
  lo.K_p = 2.0;
  const auto b = pch_performance_delta(lo, m, omegas);
  CHECK(b.ratio_bound_holds);
  CHECK(b.loop_gain_ordered);
  for (size_t i = 0; i < omegas.size(); ++i) CHECK(b.L_on[i] >= b.L_off[i]);
}
