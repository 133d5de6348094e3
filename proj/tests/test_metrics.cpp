#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "indi/metrics.hpp"
#include "indi/plant.hpp"

using namespace indi;

namespace {

PlantModel desk_plant() { return make_short_period(-1.2, -0.1, -8.0, -1.5, -12.0); }

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

ScenarioBattery short_battery() {
  ScenarioBattery b;
  b.tracking_duration = 6.0;
  b.disturbance_duration = 6.0;
  b.noise_duration = 3.0;
  b.mc_samples = 8;
  return b;
}

SimScenario mc_scenario(double half_width, int samples) {
  SimScenario sc;
  sc.kind = ScenarioKind::robustness;
  sc.duration = 6.0;
  sc.mc_samples = samples;
  sc.mc_seed = 42;
  sc.uncertainty = {{"M_alpha", half_width}, {"M_q", half_width}, {"M_eta", half_width}};
  return sc;
}

}  // namespace

TEST_CASE("rms helpers") {
  CHECK(rms({}) == 0.0);
  CHECK(rms({3.0, -3.0}) == doctest::Approx(3.0));
  CHECK(rms({1.0, 2.0, 3.0, 4.0}) == doctest::Approx(std::sqrt(7.5)));
  CHECK(rms_difference({1.0, 2.0}, {1.0, 4.0}) == doctest::Approx(std::sqrt(2.0)));
  CHECK_THROWS(rms_difference({1.0}, {}));
  SimTrace tr;
  tr.time = {0.0, 1.0};
  tr.r = {1.0, 2.0};
  tr.y = {0.0, 2.5};
  CHECK(error_series(tr) == std::vector<double>{1.0, -0.5});
  CHECK(rms_tracking_error(tr) == doctest::Approx(std::sqrt(0.625)));
}

TEST_CASE("quiescent battery gives zero metrics") {
  ScenarioBattery b = short_battery();
  b.command_amplitude = 0.0;
  b.gust.u_m = b.gust.w_m = 0.0;
  b.noise_variance = 0.0;
  for (auto& [name, w] : b.uncertainty) w = 0.0;
  const auto run = run_metrics(desk_loop(), desk_plant(), b);
  const auto& r = run.report;
  for (const auto* v : {&r.RMSer, &r.RMSur, &r.RMSed, &r.RMSud, &r.RMSen, &r.RMSun, &r.sigma_RMSer}) {
    REQUIRE(v->has_value());
    CHECK(std::abs(**v) < 1e-12);
  }
  CHECK_FALSE(r.any_divergent());
}

TEST_CASE("full battery on the desk loop") {
  const auto run = run_metrics(desk_loop(), desk_plant(), short_battery());
  const auto& r = run.report;
  CHECK(std::isfinite(r.GM_dB));
  CHECK(std::isfinite(r.PM_deg));
  CHECK(r.TDM_s > 0.0);
  for (const auto* v : {&r.RMSer, &r.RMSur, &r.RMSed, &r.RMSud, &r.RMSen, &r.RMSun, &r.sigma_RMSer}) {
    REQUIRE(v->has_value());
    CHECK(std::isfinite(**v));
    CHECK(**v > 0.0);
  }
  CHECK(r.mc_excluded == 0);
  CHECK_FALSE(r.any_divergent());
  for (const char* name : {"tracking", "disturbance", "noise", "noise_baseline"}) CHECK(run.traces.count(name) == 1);

  const auto again = run_metrics(desk_loop(), desk_plant(), short_battery());
  CHECK(*again.report.RMSen == *r.RMSen);
  CHECK(*again.report.sigma_RMSer == *r.sigma_RMSer);
}

TEST_CASE("scenario subset") {
  ScenarioBattery b = short_battery();
  b.disturbance = b.noise = b.robustness = false;
  const auto run = run_metrics(desk_loop(), desk_plant(), b);
  CHECK(run.report.RMSer.has_value());
  CHECK(run.report.RMSur.has_value());
  CHECK_FALSE(run.report.RMSed.has_value());
  CHECK_FALSE(run.report.RMSen.has_value());
  CHECK_FALSE(run.report.sigma_RMSer.has_value());
  CHECK(run.traces.size() == 1);
}

TEST_CASE("noise metrics scale with the noise standard deviation") {
  ScenarioBattery b = short_battery();
  b.tracking = b.disturbance = b.robustness = false;
  b.noise_variance = 4e-7;
  const auto one = run_metrics(desk_loop(), desk_plant(), b).report;
  b.noise_variance = 1.6e-6;
  const auto four = run_metrics(desk_loop(), desk_plant(), b).report;
  CHECK(*four.RMSen / *one.RMSen == doctest::Approx(2.0).epsilon(0.1));
  CHECK(*four.RMSun / *one.RMSun == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("larger K_p tracks better") {
  ScenarioBattery b = short_battery();
  b.disturbance = b.noise = b.robustness = false;
  double prev = INFINITY;
  for (double K_p : {2.0, 4.0, 8.0, 16.0}) {
    LoopConfig c = desk_loop();
    c.K_p = K_p;
    const double e = *run_metrics(c, desk_plant(), b).report.RMSer;
    CHECK(e < prev);
    prev = e;
  }
}

TEST_CASE("divergent runs are flagged") {
  LoopConfig c = desk_loop();
  c.B_hat = 12.0;
  ScenarioBattery b = short_battery();
  b.tracking_duration = 20.0;
  b.disturbance = b.noise = b.robustness = false;
  const auto r = run_metrics(c, desk_plant(), b).report;
  REQUIRE(r.any_divergent());
  CHECK(r.divergent.front() == "tracking");
  CHECK(std::isnan(*r.RMSer));
}

TEST_CASE("Monte-Carlo samples") {
  const auto m = desk_plant();
  const auto sc = mc_scenario(0.2, 10);
  for (int i = 0; i < 10; ++i) {
    const auto p = mc_sample_plant(m, sc, i);
    CHECK(p.derivatives.at("Z_alpha") == m.derivatives.at("Z_alpha"));
    for (const char* name : {"M_alpha", "M_q", "M_eta"}) {
      const double ratio = p.derivatives.at(name) / m.derivatives.at(name);
      CHECK(ratio >= 0.8);
      CHECK(ratio <= 1.2);
    }
    CHECK(mc_sample_plant(m, sc, i).A == p.A);
  }
  CHECK(mc_sample_plant(m, sc, 0).A != mc_sample_plant(m, sc, 1).A);
  SimScenario bad = sc;
  bad.uncertainty["Q_nope"] = 0.1;
  CHECK_THROWS(robustness_mc(desk_loop(), m, bad));
  CHECK_THROWS(robustness_mc(desk_loop(), m, mc_scenario(0.2, 1)));
}

TEST_CASE("zero uncertainty gives zero spread") {
  const auto res = robustness_mc(desk_loop(), desk_plant(), mc_scenario(0.0, 4));
  CHECK(std::abs(res.sigma) < 1e-12);
  CHECK(res.excluded == 0);
}

TEST_CASE("robustness spread is deterministic and scales with the half-width") {
  const auto m = desk_plant();
  const auto a = robustness_mc(desk_loop(), m, mc_scenario(0.2, 100));
  const auto b = robustness_mc(desk_loop(), m, mc_scenario(0.2, 100));
  CHECK(a.sigma == b.sigma);
  CHECK(a.samples == b.samples);
  CHECK(a.sigma > 0.0);
  CHECK(a.excluded == 0);
  const auto c = robustness_mc(desk_loop(), m, mc_scenario(0.4, 100));
  CHECK(c.sigma / a.sigma == doctest::Approx(2.0).epsilon(0.3));
}

TEST_CASE("unstable samples are excluded") {
  SimScenario sc = mc_scenario(0.0, 40);
  sc.uncertainty = {{"M_eta", 1.6}};
  const auto res = robustness_mc(desk_loop(), desk_plant(), sc);
  CHECK(res.excluded > 0);
  CHECK(res.excluded < 40);
  CHECK(std::count_if(res.samples.begin(), res.samples.end(), [](double v) { return std::isnan(v); }) ==
        res.excluded);
  CHECK(std::isfinite(res.sigma));
}
