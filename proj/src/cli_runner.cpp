#include "indi/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/chrono.h>
#include <fmt/format.h>
#include <json.hpp>

#include "indi/config.hpp"
#include "indi/csv.hpp"
#include "indi/errors.hpp"
#include "indi/frequency.hpp"
#include "indi/loop.hpp"
#include "indi/metrics.hpp"
#include "indi/performance.hpp"
#include "indi/roots.hpp"
#include "indi/stability.hpp"

namespace fs = std::filesystem;

namespace indi {
namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(now));
}

struct CommonOptions {
  std::string config_path;
  std::string out_dir;
  std::vector<std::string> overrides;
};

// Collects every file a command writes; the manifest lists them.
class OutputSet {
 public:
  explicit OutputSet(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  const fs::path& dir() const noexcept { return dir_; }

  void csv(const std::string& name, const CsvTable& t) {
    write_csv(dir_ / name, t);
    files_.push_back({{"file", name}, {"rows", t.rows.size()}});
  }

  void text(const std::string& name, const std::string& body) {
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir_ / name).string());
    out << body;
    files_.push_back({{"file", name}, {"bytes", body.size()}});
  }

  const nlohmann::json& files() const noexcept { return files_; }

 private:
  fs::path dir_;
  nlohmann::json files_ = nlohmann::json::array();
};

struct Parsed {
  double lo = 0.0, hi = 0.0;
  size_t n = 0;
};

Parsed parse_range(const std::string& text, const char* flag, bool with_count) {
  std::vector<std::string> parts;
  size_t start = 0;
  while (true) {
    auto pos = text.find(':', start);
    parts.push_back(text.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  if (parts.size() != (with_count ? 3u : 2u))
    throw ConfigError(fmt::format("expected {}, got '{}'", with_count ? "lo:hi:count" : "lo:hi", text), flag);
  Parsed p;
  try {
    p.lo = std::stod(parts[0]);
    p.hi = std::stod(parts[1]);
    if (with_count) p.n = static_cast<size_t>(std::stoul(parts[2]));
  } catch (const std::exception&) {
    throw ConfigError(fmt::format("cannot parse '{}'", text), flag);
  }
  return p;
}

FrequencyBand parse_band(const std::string& text) {
  const auto p = parse_range(text, "--band", false);
  if (!(p.lo > 0.0) || !(p.hi > p.lo)) throw ConfigError("need 0 < lo < hi", "--band");
  return {p.lo, p.hi};
}

std::vector<double> parse_axis(const std::string& text, const char* flag) {
  const auto p = parse_range(text, flag, true);
  if (p.n < 1 || p.lo < 0.0 || p.hi < p.lo) throw ConfigError("need 0 <= lo <= hi and count >= 1", flag);
  if (p.n == 1) return {p.lo};
  std::vector<double> v(p.n);
  for (size_t i = 0; i < p.n; ++i) v[i] = p.lo + (p.hi - p.lo) * static_cast<double>(i) / static_cast<double>(p.n - 1);
  return v;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  size_t start = 0;
  while (start <= text.size()) {
    auto pos = text.find(',', start);
    std::string item = text.substr(start, pos == std::string::npos ? std::string::npos : pos - start);
    if (!item.empty()) out.push_back(item);
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

void add_bode_rows(CsvTable& t, const std::vector<std::string>& prefix, const FrequencyResponse& fr) {
  for (size_t i = 0; i < fr.size(); ++i) {
    auto row = prefix;
    row.push_back(csv_cell(fr.omega[i]));
    row.push_back(csv_cell(fr.magnitude_db(i)));
    row.push_back(csv_cell(fr.phase_deg(i)));
    t.add_row(std::move(row));
  }
}

bool closed_loop_stable(const TFExpr& loop) {
  try {
    return max_real_part(loop_characteristic_polynomial(loop)) < kStabilityGuard;
  } catch (const RootFindingError&) {
    return false;
  }
}

CsvTable metrics_row_table() {
  return CsvTable{{"GM_dB", "PM_deg", "TDM_s", "RMSer", "RMSur", "RMSed", "RMSud", "RMSen", "RMSun", "sigma_RMSer",
                   "mc_excluded", "divergent"},
                  {}};
}

std::vector<std::pair<std::string, std::optional<double>>> metric_fields(const MetricsReport& r) {
  return {{"GM_dB", r.GM_dB},   {"PM_deg", r.PM_deg}, {"TDM_s", r.TDM_s}, {"RMSer", r.RMSer},
          {"RMSur", r.RMSur},   {"RMSed", r.RMSed},   {"RMSud", r.RMSud}, {"RMSen", r.RMSen},
          {"RMSun", r.RMSun},   {"sigma_RMSer", r.sigma_RMSer}};
}

std::string divergent_list(const MetricsReport& r) {
  std::string s;
  for (size_t i = 0; i < r.divergent.size(); ++i) s += (i ? ";" : "") + r.divergent[i];
  return s;
}

std::vector<std::string> metrics_row(const MetricsReport& r) {
  std::vector<std::string> row;
  for (const auto& [name, v] : metric_fields(r)) row.push_back(v ? csv_cell(*v) : std::string{});
  row.push_back(csv_cell(r.mc_excluded));
  row.push_back(divergent_list(r));
  return row;
}

std::string metrics_text(const MetricsReport& r) {
  std::string s;
  for (const auto& [name, v] : metric_fields(r))
    if (v) s += fmt::format("{} = {}\n", name, csv_cell(*v));
  s += fmt::format("mc_excluded = {}\n", r.mc_excluded);
  s += fmt::format("divergent = {}\n", divergent_list(r));
  return s;
}

CsvTable trace_table(const SimTrace& tr, size_t stride) {
  CsvTable t{{"time_s", "command_deg_s", "r_deg_s", "y_deg_s", "y_m_deg_s", "u_c_deg", "u_deg", "u_hat_deg",
              "v_h_deg_s2"},
             {}};
  for (size_t i = 0; i < tr.size(); i += stride)
    t.add_row({csv_cell(tr.time[i]), csv_cell(tr.command[i]), csv_cell(tr.r[i]), csv_cell(tr.y[i]),
               csv_cell(tr.y_m[i]), csv_cell(tr.u_c[i]), csv_cell(tr.u[i]), csv_cell(tr.u_hat[i]),
               csv_cell(tr.v_h[i])});
  return t;
}

class Runner {
 public:
  Runner(std::string command, std::vector<std::string> args, CommonOptions opts)
      : command_(std::move(command)), args_(std::move(args)), opts_(std::move(opts)), started_(utc_now()) {
    cfg_ = load_config(opts_.config_path, opts_.overrides);
    for (const auto& w : cfg_.loop.warnings()) {
      warnings_.push_back(w);
      std::cerr << "warning: " << w << '\n';
    }
    fs::path dir = opts_.out_dir;
    if (dir.empty()) {
      const char* env = std::getenv("INDILOOP_OUT");
      dir = env && *env ? fs::path(env) : fs::path("indiloop_out");
    }
    out_.emplace(dir);
  }

  Config& config() { return cfg_; }
  OutputSet& out() { return *out_; }
  void note(const std::string& key, nlohmann::json value) { extra_[key] = std::move(value); }

  int finish(int code) {
    out_->text("resolved.ini", resolved_ini(cfg_));
    nlohmann::json m;
    m["command"] = command_;
    m["arguments"] = args_;
    m["config_path"] = opts_.config_path;
    m["overrides"] = opts_.overrides;
    m["resolved_config"] = resolved_ini(cfg_);
    m["output_dir"] = fs::absolute(out_->dir()).string();
    m["seed"] = cfg_.battery.seed;
    m["tool_version"] = INDILOOP_VERSION;
    m["started_utc"] = started_;
    m["finished_utc"] = utc_now();
    m["exit_code"] = code;
    m["warnings"] = warnings_;
    m["details"] = extra_;
    m["outputs"] = out_->files();
    std::ofstream f(out_->dir() / "manifest.json", std::ios::binary);
    f << m.dump(2) << '\n';
    return code;
  }

 private:
  std::string command_;
  std::vector<std::string> args_;
  CommonOptions opts_;
  std::string started_;
  Config cfg_;
  std::optional<OutputSet> out_;
  std::vector<std::string> warnings_;
  nlohmann::json extra_ = nlohmann::json::object();
};

int cmd_margins(Runner& run, const std::string& band_text, size_t points, const std::string& pch) {
  const auto band = parse_band(band_text);
  std::vector<bool> variants;
  if (pch == "both") variants = {false, true};
  else if (pch == "off") variants = {false};
  else if (pch == "on") variants = {true};
  else throw ConfigError("expected on, off or both", "--pch");
  run.note("pch", pch);

  CsvTable t{{"pch", "gain_margin", "gain_margin_db", "phase_margin_deg", "time_delay_margin_s",
              "gain_crossover_rad_s", "gain_crossovers", "phase_crossovers", "first_phase_crossover_rad_s",
              "closed_loop_stable"},
             {}};
  bool all_stable = true;
  for (bool on : variants) {
    LoopConfig lc = run.config().loop;
    lc.pch = on;
    const TFExpr L = open_loop(lc, run.config().plant);
    const MarginReport r = margins(L, band, points);
    const bool stable = closed_loop_stable(L);
    all_stable = all_stable && stable;
    t.add_row({csv_cell(on), csv_cell(r.gain_margin), csv_cell(r.gain_margin_db()), csv_cell(r.phase_margin),
               csv_cell(r.time_delay_margin), csv_cell(r.gain_crossover), csv_cell(r.gain_crossovers.size()),
               csv_cell(r.phase_crossovers.size()),
               csv_cell(r.phase_crossovers.empty() ? std::numeric_limits<double>::quiet_NaN() : r.phase_crossovers[0]),
               csv_cell(stable)});
  }
  run.out().csv("margins.csv", t);
  return run.finish(all_stable ? exit_ok : exit_divergence);
}

TFExpr pick_transfer(const Config& c, const std::string& name) {
  if (name == "L_u") return open_loop(c.loop, c.plant);
  const LoopSet s = closed_loop(c.loop, c.plant);
  if (name == "T_yc") return s.T_yc;
  if (name == "T_ymc") return s.T_ymc;
  if (name == "C_bar") return s.C_bar;
  throw ConfigError(fmt::format("unknown transfer '{}' (L_u, T_yc, T_ymc, C_bar)", name), "--transfer");
}

struct BodeOptions {
  std::string band = "0.01:1000";
  size_t points = 500;
  std::string transfer = "L_u";
  std::string gamma1;
  std::string gamma2;
  bool performance = false;
};

int cmd_bode(Runner& run, const BodeOptions& o, bool nyquist) {
  const auto band = parse_band(o.band);
  if (o.points < 2) throw ConfigError("need at least 2 points", "--points");
  const auto omegas = log_space(band.lo, band.hi, o.points);
  const auto& c = run.config();
  const auto fr = freq_response(pick_transfer(c, o.transfer), omegas);
  run.note("transfer", o.transfer);

  if (nyquist) {
    CsvTable t{{"omega_rad_s", "re", "im"}, {}};
    for (size_t i = 0; i < fr.size(); ++i)
      t.add_row({csv_cell(fr.omega[i]), csv_cell(fr.value[i].real()), csv_cell(fr.value[i].imag())});
    run.out().csv("nyquist.csv", t);
    return run.finish(exit_ok);
  }

  CsvTable t{{"omega_rad_s", "magnitude_db", "phase_deg"}, {}};
  add_bode_rows(t, {}, fr);
  run.out().csv("bode.csv", t);

  if (!o.gamma1.empty()) {
    CsvTable g{{"tau1_s", "omega_rad_s", "magnitude_db", "phase_deg"}, {}};
    for (const auto& item : split_list(o.gamma1)) {
      double tau = 0.0;
      try {
        tau = std::stod(item);
      } catch (const std::exception&) {
        throw ConfigError(fmt::format("cannot parse '{}'", item), "--gamma1");
      }
      add_bode_rows(g, {csv_cell(tau)}, freq_response(TFExpr(gamma1(tau, c.loop.T_act)), omegas));
    }
    run.out().csv("gamma1.csv", g);
  }
  if (!o.gamma2.empty()) {
    CsvTable g{{"tau1_s", "tau2_s", "omega_rad_s", "magnitude_db", "phase_deg"}, {}};
    for (const auto& item : split_list(o.gamma2)) {
      const auto p = parse_range(item, "--gamma2", false);
      add_bode_rows(g, {csv_cell(p.lo), csv_cell(p.hi)},
                    freq_response(TFExpr(gamma2(p.lo, p.hi, c.loop.T_act)), omegas));
    }
    run.out().csv("gamma2.csv", g);
  }
  if (o.performance) {
    const PerformanceSet ps = performance_set(c.loop, c.plant);
    CsvTable p{{"function", "omega_rad_s", "magnitude_db", "phase_deg"}, {}};
    const std::pair<const char*, const TFExpr*> fns[] = {{"S", &ps.S}, {"T_ec", &ps.T_ec}, {"T_yd", &ps.T_yd}, {"T_yn", &ps.T_yn}};
    for (const auto& [name, expr] : fns) add_bode_rows(p, {name}, freq_response(*expr, omegas));
    run.out().csv("performance.csv", p);
  }
  return run.finish(exit_ok);
}

int cmd_region(Runner& run, const std::string& tau1_text, const std::string& tau2_text, const std::string& gains) {
  const auto tau1 = parse_axis(tau1_text, "--tau1");
  const auto tau2 = parse_axis(tau2_text, "--tau2");
  const auto& c = run.config();
  std::vector<std::pair<double, double>> panels;
  if (gains.empty()) {
    panels.push_back({c.loop.K_p, c.loop.K_v});
  } else {
    for (const auto& item : split_list(gains)) {
      const auto p = parse_range(item, "--gains", false);
      panels.push_back({p.lo, p.hi});
    }
  }
  CsvTable cells{{"K_p", "K_v", "tau1_s", "tau2_s", "stable", "verdict", "max_real_part"}, {}};
  CsvTable summary{{"K_p", "K_v", "stable_cells", "indeterminate_cells", "cells"}, {}};
  for (const auto& [kp, kv] : panels) {
    LoopConfig lc = c.loop;
    lc.K_p = kp;
    lc.K_v = kv;
    const auto g = delay_stability_grid(lc, c.plant, tau1, tau2);
    size_t indeterminate = 0;
    for (size_t i = 0; i < tau1.size(); ++i) {
      for (size_t j = 0; j < tau2.size(); ++j) {
        const auto v = g.at(i, j);
        indeterminate += v == CellVerdict::indeterminate;
        const char* name = v == CellVerdict::stable ? "stable" : v == CellVerdict::unstable ? "unstable" : "indeterminate";
        cells.add_row({csv_cell(kp), csv_cell(kv), csv_cell(tau1[i]), csv_cell(tau2[j]),
                       csv_cell(v == CellVerdict::stable), name, csv_cell(g.max_real_at(i, j))});
      }
    }
    summary.add_row({csv_cell(kp), csv_cell(kv), csv_cell(g.stable_count()), csv_cell(indeterminate),
                     csv_cell(g.verdict.size())});
  }
  run.out().csv("region.csv", cells);
  run.out().csv("region_summary.csv", summary);
  return run.finish(exit_ok);
}

void select_scenarios(ScenarioBattery& b, const std::vector<std::string>& names) {
  if (names.empty()) return;
  b.tracking = b.disturbance = b.noise = b.robustness = false;
  for (const auto& n : names) {
    if (n == "tracking") b.tracking = true;
    else if (n == "disturbance") b.disturbance = true;
    else if (n == "noise") b.noise = true;
    else if (n == "robustness") b.robustness = true;
    else throw ConfigError(fmt::format("unknown scenario '{}'", n), "--scenario");
  }
}

int cmd_evaluate(Runner& run, const std::vector<std::string>& scenarios, size_t stride, const std::string& band_text) {
  if (stride < 1) throw ConfigError("must be >= 1", "--trace-stride");
  auto& c = run.config();
  select_scenarios(c.battery, scenarios);
  const MetricsRun res = run_metrics(c.loop, c.plant, c.battery, parse_band(band_text));
  CsvTable t = metrics_row_table();
  t.add_row(metrics_row(res.report));
  run.out().csv("metrics.csv", t);
  run.out().text("metrics.txt", metrics_text(res.report));
  for (const auto& [name, tr] : res.traces) run.out().csv("trace_" + name + ".csv", trace_table(tr, stride));
  return run.finish(res.report.any_divergent() ? exit_divergence : exit_ok);
}

struct SweepOptions {
  std::string parameter, values, parameter2, values2;
  bool zip = false;
  std::string band = "0.001:10000";
};

std::vector<double> parse_values(const std::string& text, const char* flag) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("cannot parse '{}'", item), flag);
    }
  }
  return out;
}

int cmd_sweep(Runner& run, const SweepOptions& o) {
  const auto& base = run.config();
  SweepSpec spec;
  if (!o.parameter.empty()) {
    spec.parameter = o.parameter;
    spec.values = parse_values(o.values, "--values");
    spec.parameter2 = o.parameter2;
    spec.values2 = parse_values(o.values2, "--values2");
    spec.zip = o.zip;
  } else if (base.sweep) {
    spec = *base.sweep;
  } else {
    throw ConfigError("no sweep given: add a [sweep] section or --param/--values", "sweep");
  }
  if (spec.values.empty()) throw ConfigError("empty value list", "--values");
  if (!spec.parameter2.empty() && spec.values2.empty()) throw ConfigError("empty value list", "--values2");
  if (spec.zip && spec.values.size() != spec.values2.size())
    throw ConfigError("zip mode needs value lists of equal length", "--values2");

  std::vector<std::pair<double, double>> points;
  const double none = std::numeric_limits<double>::quiet_NaN();
  if (spec.parameter2.empty()) {
    for (double v : spec.values) points.push_back({v, none});
  } else if (spec.zip) {
    for (size_t i = 0; i < spec.values.size(); ++i) points.push_back({spec.values[i], spec.values2[i]});
  } else {
    for (double a : spec.values)
      for (double b : spec.values2) points.push_back({a, b});
  }
  // Validate every point before the first expensive run.
  std::vector<Config> configs;
  for (const auto& [a, b] : points) {
    Config c = with_parameter(base, spec.parameter, a);
    if (!spec.parameter2.empty()) c = with_parameter(c, spec.parameter2, b);
    configs.push_back(std::move(c));
  }

  const auto band = parse_band(o.band);
  CsvTable t{{"point", "parameter", "value", "parameter2", "value2", "metric", "metric_value"}, {}};
  CsvTable wide = metrics_row_table();
  wide.header.insert(wide.header.begin(), {"point", "value", "value2"});
  bool divergent = false;
  for (size_t i = 0; i < configs.size(); ++i) {
    const auto& c = configs[i];
    const MetricsRun res = run_metrics(c.loop, c.plant, c.battery, band);
    divergent = divergent || res.report.any_divergent();
    for (const auto& [name, v] : metric_fields(res.report)) {
      if (!v) continue;
      t.add_row({csv_cell(i), spec.parameter, csv_cell(points[i].first), spec.parameter2,
                 spec.parameter2.empty() ? std::string{} : csv_cell(points[i].second), name, csv_cell(*v)});
    }
    auto row = metrics_row(res.report);
    row.insert(row.begin(), {csv_cell(i), csv_cell(points[i].first),
                             spec.parameter2.empty() ? std::string{} : csv_cell(points[i].second)});
    wide.add_row(std::move(row));
  }
  run.note("sweep", {{"parameter", spec.parameter}, {"parameter2", spec.parameter2}, {"points", points.size()}});
  run.out().csv("sweep.csv", t);
  run.out().csv("sweep_wide.csv", wide);
  return run.finish(divergent ? exit_divergence : exit_ok);
}

void add_common(CLI::App* sub, CommonOptions& o) {
  sub->add_option("-c,--config", o.config_path, "configuration file (INI)")->required();
  sub->add_option("-o,--out", o.out_dir, "output directory (overrides INDILOOP_OUT)");
  sub->add_option("--set", o.overrides, "override a value: section.key=value (repeatable)");
}

int dispatch(int argc, char** argv) {
  CLI::App app{"Stability and performance analysis of incremental (INDI) control loops", "indiloop"};
  app.set_version_flag("--version", INDILOOP_VERSION);
  app.require_subcommand(1);

  CommonOptions common;
  std::string band = "0.001:10000";
  size_t points = 801;
  std::string pch = "both";
  auto* margins_cmd = app.add_subcommand("margins", "gain, phase and time-delay margins, PCH off and on");
  add_common(margins_cmd, common);
  margins_cmd->add_option("--band", band, "frequency band lo:hi in rad/s");
  margins_cmd->add_option("--points", points, "scan points before refinement (at least 801)");
  margins_cmd->add_option("--pch", pch, "on, off or both");

  BodeOptions bode;
  auto* bode_cmd = app.add_subcommand("bode", "magnitude and phase over a log grid");
  add_common(bode_cmd, common);
  bode_cmd->add_option("--band", bode.band, "frequency band lo:hi in rad/s");
  bode_cmd->add_option("--points", bode.points, "number of log-spaced frequencies");
  bode_cmd->add_option("--transfer", bode.transfer, "L_u, T_yc, T_ymc or C_bar");
  bode_cmd->add_option("--gamma1", bode.gamma1, "synchronized-delay lag curves for tau1 list, e.g. 0.01,0.02");
  bode_cmd->add_option("--gamma2", bode.gamma2, "asynchronous-delay lag curves, tau1:tau2 list");
  bode_cmd->add_flag("--performance", bode.performance, "also write S, T_ec, T_yd, T_yn");

  BodeOptions nyq;
  auto* nyq_cmd = app.add_subcommand("nyquist", "real and imaginary parts over a log grid");
  add_common(nyq_cmd, common);
  nyq_cmd->add_option("--band", nyq.band, "frequency band lo:hi in rad/s");
  nyq_cmd->add_option("--points", nyq.points, "number of log-spaced frequencies");
  nyq_cmd->add_option("--transfer", nyq.transfer, "L_u, T_yc, T_ymc or C_bar");

  std::string tau1 = "0:0.1:81", tau2 = "0:0.1:81", gains;
  auto* region_cmd = app.add_subcommand("region", "closed-loop stability over sensor and measurement path delays");
  add_common(region_cmd, common);
  region_cmd->add_option("--tau1", tau1, "sensor-path delay axis lo:hi:count (s)");
  region_cmd->add_option("--tau2", tau2, "measurement-path delay axis lo:hi:count (s)");
  region_cmd->add_option("--gains", gains, "panels as K_p:K_v list, e.g. 5:50,10:50");

  std::vector<std::string> scenarios;
  size_t stride = 10;
  std::string eval_band = "0.001:10000";
  auto* eval_cmd = app.add_subcommand("evaluate", "metric battery: margins, tracking, gust, noise, Monte-Carlo");
  add_common(eval_cmd, common);
  eval_cmd->add_option("--scenario", scenarios, "run only these scenarios (repeatable)");
  eval_cmd->add_option("--trace-stride", stride, "write every n-th simulation step");
  eval_cmd->add_option("--band", eval_band, "margin search band lo:hi in rad/s");

  SweepOptions sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "metric battery over one or two parameters");
  add_common(sweep_cmd, common);
  sweep_cmd->add_option("--param", sweep.parameter, "parameter name (overrides [sweep])");
  sweep_cmd->add_option("--values", sweep.values, "comma-separated values");
  sweep_cmd->add_option("--param2", sweep.parameter2, "second parameter");
  sweep_cmd->add_option("--values2", sweep.values2, "comma-separated values");
  sweep_cmd->add_flag("--zip", sweep.zip, "pair the two value lists instead of the full grid");
  sweep_cmd->add_option("--band", sweep.band, "margin search band lo:hi in rad/s");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_config;
  }

  std::vector<std::string> args(argv, argv + argc);
  auto* sub = app.get_subcommands().front();
  Runner run(sub->get_name(), args, common);
  if (sub == margins_cmd) return cmd_margins(run, band, points, pch);
  if (sub == bode_cmd) return cmd_bode(run, bode, false);
  if (sub == nyq_cmd) return cmd_bode(run, nyq, true);
  if (sub == region_cmd) return cmd_region(run, tau1, tau2, gains);
  if (sub == eval_cmd) return cmd_evaluate(run, scenarios, stride, eval_band);
  return cmd_sweep(run, sweep);
}

}  // namespace

int run_cli(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return exit_config;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return exit_config;
  } catch (const std::domain_error& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return exit_config;
  } catch (const SingularEvaluation& e) {
    std::cerr << "numerical failure: " << e.what() << " at w = " << e.omega() << " rad/s\n";
    return exit_numerical;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return exit_numerical;
  }
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<std::string> copy = args;
  std::vector<char*> argv;
  for (auto& a : copy) argv.push_back(a.data());
  argv.push_back(nullptr);
  return run_cli(static_cast<int>(copy.size()), argv.data());
}

}  // namespace indi
