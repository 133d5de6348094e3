#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "indi/config.hpp"
#include "indi/csv.hpp"
#include "indi/errors.hpp"

using namespace indi;

namespace {

constexpr const char* kDesk = R"(# desk
[plant]
model = short_period
Z_alpha = -1.2
Z_eta = -0.1
M_alpha = -8.0  # trailing comment
M_q = -1.5
M_eta = -12.0

[loop]
; full-line comment
K_p = 8
K_v = 20
K_r = 5
T_act = 0.02
tau_a = 0.005
T_sensor = 0.01
tau_s = 0.01
T_diff = 1/30
comp_filter = true
comp_sensor = on

[scenario]
mc_samples = 10
uncertainty_M_q = 0.3
scenarios = tracking, noise

[sweep]
parameter = K_p
values = 2, 4, 8
)";

std::string error_where(const std::string& text, const std::vector<std::string>& overrides = {}) {
  try {
    IniDocument doc = IniDocument::parse(text, "desk.ini");
    for (const auto& o : overrides) doc.set(o);
    resolve_config(doc);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

std::string replace(std::string text, const std::string& from, const std::string& to) {
  text.replace(text.find(from), from.size(), to);
  return text;
}

}  // namespace

TEST_CASE("parse the desk config") {
  const Config c = resolve_config(IniDocument::parse(kDesk));
  CHECK(c.plant.kind == PlantKind::short_period);
  CHECK(c.plant.cb() == -12.0);
  CHECK(c.plant.derivatives.at("M_alpha") == -8.0);
  CHECK(c.loop.K_p == 8.0);
  CHECK(c.loop.T_diff == doctest::Approx(1.0 / 30.0).epsilon(1e-15));
  CHECK(c.loop.B_hat == -12.0);
  CHECK(c.loop.comp_filter);
  CHECK(c.loop.comp_sensor);
  CHECK_FALSE(c.loop.pch);
  CHECK(c.loop.tau_am == 0.0);
  CHECK(c.battery.mc_samples == 10);
  CHECK(c.battery.uncertainty.size() == 1);
  CHECK(c.battery.uncertainty.at("M_q") == 0.3);
  CHECK(c.battery.tracking);
  CHECK(c.battery.noise);
  CHECK_FALSE(c.battery.disturbance);
  CHECK_FALSE(c.battery.robustness);
  REQUIRE(c.sweep.has_value());
  CHECK(c.sweep->parameter == "K_p");
  CHECK(c.sweep->values == std::vector<double>{2.0, 4.0, 8.0});
}

TEST_CASE("B_hat scaling") {
  const Config c = resolve_config(IniDocument::parse(replace(kDesk, "K_p = 8", "K_p = 8\nB_hat_scale = 1.3")));
  CHECK(c.loop.B_hat == doctest::Approx(-15.6));
  const Config d = resolve_config(IniDocument::parse(replace(kDesk, "K_p = 8", "K_p = 8\nB_hat = -10")));
  CHECK(d.loop.B_hat == -10.0);
}

TEST_CASE("config errors name the key and line") {
  CHECK(error_where(replace(kDesk, "K_v = 20", "K_q = 20")).find("desk.ini line 13: [loop] K_q") != std::string::npos);
  CHECK(error_where(replace(kDesk, "K_v = 20\n", "")).find("[loop] K_v") != std::string::npos);
  CHECK(error_where(replace(kDesk, "K_r = 5", "K_r = fast")).find("line 14: [loop] K_r") != std::string::npos);
  CHECK(error_where(replace(kDesk, "K_r = 5", "K_r = 0")).find("K_r") != std::string::npos);
  CHECK(error_where(replace(kDesk, "[sweep]", "[sweeps]")).find("sweeps") != std::string::npos);
  CHECK(error_where(replace(kDesk, "M_q = -1.5", "M_q = -1.5\nM_q = -2")).find("M_q") != std::string::npos);
  CHECK(error_where(replace(kDesk, "model = short_period", "model = glider")).find("model") != std::string::npos);
  CHECK(error_where(replace(kDesk, "M_eta = -12.0", "M_eta = 0")).find("model") != std::string::npos);
  CHECK(error_where(replace(kDesk, "scenarios = tracking, noise", "scenarios = tracking, gusts"))
            .find("scenarios") != std::string::npos);
  CHECK(error_where(replace(kDesk, "mc_samples = 10", "mc_samples = 1.5")).find("mc_samples") != std::string::npos);
  CHECK(error_where(replace(kDesk, "uncertainty_M_q", "uncertainty_M_zz")).find("M_zz") != std::string::npos);
  CHECK(error_where(replace(kDesk, "comp_filter = true", "comp_filter = maybe")).find("comp_filter") !=
        std::string::npos);
  CHECK(error_where("K_p = 3\n").find("line 1") != std::string::npos);
  CHECK(error_where("[loop\nK_p = 3\n").find("line 1") != std::string::npos);
  CHECK(error_where(kDesk, {"loop.K_q=1"}).find("--set loop.K_q") != std::string::npos);
  CHECK(error_where(kDesk, {"loop.K_p=abc"}).find("--set loop.K_p") != std::string::npos);
  CHECK_THROWS_AS(IniDocument::parse(kDesk).set("no_dot_here"), ConfigError);
  CHECK(error_where(kDesk).empty());
}

TEST_CASE("overrides") {
  IniDocument doc = IniDocument::parse(kDesk);
  doc.set("loop.K_p=16");
  doc.set("loop.pch = true");
  doc.set("scenario.seed=7");
  const Config c = resolve_config(doc);
  CHECK(c.loop.K_p == 16.0);
  CHECK(c.loop.pch);
  CHECK(c.battery.seed == 7);
}

TEST_CASE("generic plant") {
  const std::string text = R"([plant]
model = generic
A = 0 1; -2 -3
B = 0, 1
C = 0 2
gust_input = 0 -2

[loop]
K_p = 1
K_v = 2
K_r = 3
T_act = 0.05
)";
  const Config c = resolve_config(IniDocument::parse(text));
  CHECK(c.plant.order() == 2);
  CHECK(c.plant.A(1, 0) == -2.0);
  CHECK(c.plant.cb() == 2.0);
  CHECK(c.loop.B_hat == 2.0);
  CHECK(c.plant.gust_input(1) == -2.0);
  CHECK(error_where(replace(text, "gust_input = 0 -2", "gust_input = 1")).find("gust_input") != std::string::npos);
}

TEST_CASE("resolved config parses back to the same values") {
  for (const std::string& text : {std::string(kDesk), replace(kDesk, "K_p = 8", "K_p = 8\nB_hat_scale = 0.7")}) {
    const Config a = resolve_config(IniDocument::parse(text));
    const std::string ini = resolved_ini(a);
    const Config b = resolve_config(IniDocument::parse(ini, "resolved.ini"));
    CHECK(resolved_ini(b) == ini);
    CHECK(b.loop.K_p == a.loop.K_p);
    CHECK(b.loop.T_diff == a.loop.T_diff);
    CHECK(b.loop.B_hat == doctest::Approx(a.loop.B_hat).epsilon(1e-15));
    CHECK(b.plant.A == a.plant.A);
    CHECK(b.battery.uncertainty == a.battery.uncertainty);
    CHECK(b.battery.noise == a.battery.noise);
    CHECK(b.battery.robustness == a.battery.robustness);
    CHECK(b.sweep->values == a.sweep->values);
  }
}

TEST_CASE("sweep parameters") {
  const Config c = resolve_config(IniDocument::parse(kDesk));
  CHECK(with_parameter(c, "K_p", 4.0).loop.K_p == 4.0);
  CHECK(with_parameter(c, "1/T_act", 100.0).loop.T_act == doctest::Approx(0.01));
  CHECK(with_parameter(c, "1/T_diff", 50.0).loop.T_diff == doctest::Approx(0.02));
  CHECK(with_parameter(c, "B_hat_scale", 1.3).loop.B_hat == doctest::Approx(-15.6));
  CHECK(with_parameter(c, "tau_am", 0.01).loop.tau_am == 0.01);
  CHECK(with_parameter(c, "plant.M_q", -3.0).plant.A(1, 1) == -3.0);
  CHECK(with_parameter(c, "scenario.noise_variance", 1e-6).battery.noise_variance == 1e-6);
  CHECK_THROWS_AS(with_parameter(c, "K_x", 1.0), ConfigError);
  CHECK_THROWS_AS(with_parameter(c, "1/K_p", 1.0), ConfigError);
  CHECK_THROWS_AS(with_parameter(c, "plant.Q", 1.0), ConfigError);
  CHECK_THROWS_AS(with_parameter(c, "hardware.K_p", 1.0), ConfigError);
  // The original stays untouched.
  CHECK(c.loop.K_p == 8.0);
}

TEST_CASE("csv cells") {
  CHECK(csv_cell(0.1) == "0.1");
  CHECK(csv_cell(1.0 / 3.0) == "0.3333333333333333");
  CHECK(csv_cell(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(csv_cell(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(csv_cell(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(csv_cell(true) == "1");
  CHECK(csv_cell(42) == "42");
  CHECK(std::isinf(parse_cell("inf")));
  CHECK(parse_cell("-inf") < 0.0);
  CHECK(std::isnan(parse_cell("nan")));
  CHECK_THROWS(parse_cell("1.5x"));
}

TEST_CASE("csv round trip") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  std::uniform_real_distribution<double> e(-300.0, 300.0);
  CsvTable t;
  t.header = {"a", "b", "label"};
  for (int i = 0; i < 500; ++i) t.add_row({csv_cell(u(rng) * std::pow(10.0, e(rng) / 10.0)), csv_cell(u(rng)), "x"});
  t.add_row({"inf", "nan", "y"});
  const CsvTable back = parse_csv(to_csv(t));
  CHECK(back.header == t.header);
  REQUIRE(back.rows.size() == t.rows.size());
  for (size_t i = 0; i + 1 < t.rows.size(); ++i) {
    CHECK(back.number(i, "a") == parse_cell(t.rows[i][0]));
    CHECK(csv_cell(back.number(i, "b")) == t.rows[i][1]);
  }
  CHECK(std::isinf(back.number(500, "a")));
  CHECK(back.column("label") == 2);
  CHECK_THROWS_AS(back.column("zzz"), std::out_of_range);
  CHECK_THROWS(t.add_row({"1"}));
}
