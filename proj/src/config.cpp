#include "indi/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <string_view>

#include <fmt/format.h>

#include "indi/errors.hpp"

namespace indi {
namespace {

const std::set<std::string> kSections{"plant", "loop", "scenario", "sweep"};
const std::vector<std::string> kLoopKeys{"K_p", "K_v", "K_r", "T_act", "tau_a", "T_sensor", "tau_s", "T_diff", "tau_am"};
const std::vector<std::string> kScenarioNames{"tracking", "disturbance", "noise", "robustness"};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::optional<double> parse_plain(std::string_view s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end) return std::nullopt;
  return v;
}

// Accepts plain numbers and simple ratios such as 1/30.
std::optional<double> parse_number(std::string_view text) {
  const std::string s = trim(text);
  if (s.empty()) return std::nullopt;
  if (auto v = parse_plain(s)) return v;
  const auto slash = s.find('/');
  if (slash == std::string::npos) return std::nullopt;
  auto a = parse_plain(trim(std::string_view(s).substr(0, slash)));
  auto b = parse_plain(trim(std::string_view(s).substr(slash + 1)));
  if (!a || !b || *b == 0.0) return std::nullopt;
  return *a / *b;
}

class SectionReader {
 public:
  SectionReader(const IniDocument& doc, std::string section) : doc_(doc), section_(std::move(section)) {
    auto it = doc.sections().find(section_);
    if (it != doc.sections().end()) entries_ = &it->second;
  }

  bool has(const std::string& key) const { return entries_ && entries_->count(key); }

  std::string where(const std::string& key) const {
    if (has(key)) {
      const int line = entries_->at(key).line;
      if (line > 0) return fmt::format("{} line {}: [{}] {}", doc_.origin(), line, section_, key);
      return fmt::format("--set {}.{}", section_, key);
    }
    return fmt::format("[{}] {}", section_, key);
  }

  std::optional<std::string> text(const std::string& key) {
    if (!has(key)) return std::nullopt;
    used_.insert(key);
    return entries_->at(key).value;
  }

  double required(const std::string& key) {
    if (!has(key)) throw ConfigError("missing required field", where(key));
    return number(key, 0.0);
  }

  double number(const std::string& key, double fallback) {
    auto t = text(key);
    if (!t) return fallback;
    auto v = parse_number(*t);
    if (!v) throw ConfigError(fmt::format("expected a number, got '{}'", *t), where(key));
    return *v;
  }

  std::vector<double> numbers(const std::string& key) {
    auto t = text(key);
    if (!t) return {};
    std::vector<double> out;
    for (const auto& item : split(*t, ',')) {
      auto v = parse_number(item);
      if (!v) throw ConfigError(fmt::format("expected a comma-separated number list, got '{}'", *t), where(key));
      out.push_back(*v);
    }
    return out;
  }

  bool boolean(const std::string& key, bool fallback) {
    auto t = text(key);
    if (!t) return fallback;
    std::string v = *t;
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
    if (v == "true" || v == "on" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "off" || v == "no" || v == "0") return false;
    throw ConfigError(fmt::format("expected true/false, got '{}'", *t), where(key));
  }

  std::vector<std::string> keys_with_prefix(const std::string& prefix) const {
    std::vector<std::string> out;
    if (!entries_) return out;
    for (const auto& [k, e] : *entries_)
      if (k.rfind(prefix, 0) == 0) out.push_back(k);
    return out;
  }

  // Rejects keys outside the schema before any required-field check runs.
  void allow(std::initializer_list<std::string_view> keys) const {
    if (!entries_) return;
    for (const auto& [k, e] : *entries_)
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) throw ConfigError("unknown key", where(k));
  }

  void finish() const {
    if (!entries_) return;
    for (const auto& [k, e] : *entries_)
      if (!used_.count(k)) throw ConfigError("unknown key", where(k));
  }

 private:
  const IniDocument& doc_;
  std::string section_;
  const std::map<std::string, IniDocument::Entry>* entries_ = nullptr;
  std::set<std::string> used_;
};

Eigen::MatrixXd parse_matrix(SectionReader& r, const std::string& key) {
  auto t = r.text(key);
  if (!t) throw ConfigError("missing required field", r.where(key));
  std::vector<std::vector<double>> rows;
  for (const auto& row : split(*t, ';')) {
    std::vector<double> vals;
    std::istringstream in(row);
    std::string tok;
    while (in >> tok) {
      for (const auto& piece : split(tok, ',')) {
        if (piece.empty()) continue;
        auto v = parse_number(piece);
        if (!v) throw ConfigError(fmt::format("bad matrix entry '{}'", piece), r.where(key));
        vals.push_back(*v);
      }
    }
    rows.push_back(std::move(vals));
  }
  const auto cols = rows.front().size();
  Eigen::MatrixXd M(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) throw ConfigError("ragged matrix rows", r.where(key));
    for (size_t j = 0; j < cols; ++j) M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return M;
}

Eigen::VectorXd flatten(const Eigen::MatrixXd& M) {
  return Eigen::Map<const Eigen::VectorXd>(M.data(), M.size());
}

PlantModel read_plant(const IniDocument& doc) {
  SectionReader r(doc, "plant");
  const auto model = r.text("model");
  if (!model) throw ConfigError("missing required field", r.where("model"));
  PlantModel p;
  try {
    if (*model == "short_period") {
      r.allow({"model", "Z_alpha", "Z_eta", "M_alpha", "M_q", "M_eta"});
      p = make_short_period(r.required("Z_alpha"), r.required("Z_eta"), r.required("M_alpha"), r.required("M_q"),
                            r.required("M_eta"));
    } else if (*model == "roll") {
      r.allow({"model", "L_p", "L_da"});
      p = make_roll(r.required("L_p"), r.required("L_da"));
    } else if (*model == "generic") {
      r.allow({"model", "A", "B", "C", "gust_input"});
      Eigen::MatrixXd A = parse_matrix(r, "A");
      Eigen::VectorXd B = flatten(parse_matrix(r, "B"));
      Eigen::RowVectorXd C = flatten(parse_matrix(r, "C")).transpose();
      p = make_plant(A, B, C);
      if (r.has("gust_input")) {
        Eigen::VectorXd g = flatten(parse_matrix(r, "gust_input"));
        if (g.size() != B.size()) throw ConfigError("length must match the state dimension", r.where("gust_input"));
        p.gust_input = g;
      }
    } else {
      throw ConfigError(fmt::format("unknown model '{}' (short_period, roll, generic)", *model), r.where("model"));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what(), r.where("model"));
  }
  r.finish();
  return p;
}

void read_loop(const IniDocument& doc, Config& c) {
  SectionReader r(doc, "loop");
  r.allow({"K_p", "K_v", "K_r", "T_act", "tau_a", "T_sensor", "tau_s", "T_diff", "tau_am", "B_hat_scale", "B_hat", "law",
           "pch", "comp_filter", "comp_sensor"});
  LoopConfig& l = c.loop;
  l.K_p = r.required("K_p");
  l.K_v = r.required("K_v");
  l.K_r = r.required("K_r");
  l.T_act = r.required("T_act");
  l.tau_a = r.number("tau_a", 0.0);
  l.T_sensor = r.number("T_sensor", 0.0);
  l.tau_s = r.number("tau_s", 0.0);
  l.T_diff = r.number("T_diff", 0.0);
  l.tau_am = r.number("tau_am", 0.0);
  c.B_hat_scale = r.number("B_hat_scale", 1.0);
  l.B_hat = r.number("B_hat", c.plant.cb()) * c.B_hat_scale;
  if (auto law = r.text("law")) {
    if (*law == "modified")
      l.law = ControlLaw::modified;
    else if (*law == "conventional")
      l.law = ControlLaw::conventional;
    else
      throw ConfigError(fmt::format("unknown law '{}' (modified, conventional)", *law), r.where("law"));
  }
  l.pch = r.boolean("pch", false);
  l.comp_filter = r.boolean("comp_filter", false);
  l.comp_sensor = r.boolean("comp_sensor", false);
  r.finish();
  try {
    l.validate();
  } catch (const ConfigError& e) {
    const std::string full = e.what();
    throw ConfigError(full.substr(e.where().size() + 2), r.where(e.where()));
  }
}

void read_scenario(const IniDocument& doc, Config& c) {
  SectionReader r(doc, "scenario");
  ScenarioBattery& b = c.battery;
  b.dt = r.number("dt", b.dt);
  b.tracking_duration = r.number("tracking_duration", b.tracking_duration);
  b.command_amplitude = r.number("command_amplitude", b.command_amplitude);
  b.command_interval = r.number("command_interval", b.command_interval);
  b.disturbance_duration = r.number("disturbance_duration", b.disturbance_duration);
  b.gust.start_time = r.number("gust_start", b.gust.start_time);
  b.gust.d_x = r.number("gust_dx", b.gust.d_x);
  b.gust.d_z = r.number("gust_dz", b.gust.d_z);
  b.gust.u_m = r.number("gust_um", b.gust.u_m);
  b.gust.w_m = r.number("gust_wm", b.gust.w_m);
  b.gust.V = r.number("airspeed", b.gust.V);
  b.noise_duration = r.number("noise_duration", b.noise_duration);
  b.noise_variance = r.number("noise_variance", b.noise_variance);
  b.noise_sample_rate = r.number("noise_sample_rate", b.noise_sample_rate);
  const double samples = r.number("mc_samples", b.mc_samples);
  if (samples < 2 || samples != std::floor(samples)) throw ConfigError("must be an integer >= 2", r.where("mc_samples"));
  b.mc_samples = static_cast<int>(samples);
  const double seed = r.number("seed", static_cast<double>(b.seed));
  if (seed < 0 || seed != std::floor(seed) || seed > 9.007199254740992e15)
    throw ConfigError("must be a non-negative integer", r.where("seed"));
  b.seed = static_cast<std::uint64_t>(seed);

  const auto uncertainty_keys = r.keys_with_prefix("uncertainty_");
  if (!uncertainty_keys.empty()) b.uncertainty.clear();
  for (const auto& key : uncertainty_keys) {
    const std::string name = key.substr(std::string("uncertainty_").size());
    if (!c.plant.derivatives.count(name))
      throw ConfigError(fmt::format("plant has no derivative '{}'", name), r.where(key));
    const double half = r.number(key, 0.0);
    if (!(half >= 0.0 && half < 1.0)) throw ConfigError("relative half-width must lie in [0, 1)", r.where(key));
    b.uncertainty[name] = half;
  }
  if (uncertainty_keys.empty()) {
    // Defaults name short-period derivatives; drop any the plant does not have.
    std::erase_if(b.uncertainty, [&](const auto& kv) { return !c.plant.derivatives.count(kv.first); });
  }

  if (auto list = r.text("scenarios")) {
    b.tracking = b.disturbance = b.noise = b.robustness = false;
    for (const auto& name : split(*list, ',')) {
      if (name == "tracking") b.tracking = true;
      else if (name == "disturbance") b.disturbance = true;
      else if (name == "noise") b.noise = true;
      else if (name == "robustness") b.robustness = true;
      else throw ConfigError(fmt::format("unknown scenario '{}'", name), r.where("scenarios"));
    }
  }
  r.finish();
}

void read_sweep(const IniDocument& doc, Config& c) {
  if (!doc.sections().count("sweep")) return;
  SectionReader r(doc, "sweep");
  r.allow({"parameter", "values", "parameter2", "values2", "mode"});
  SweepSpec s;
  auto p = r.text("parameter");
  if (!p) throw ConfigError("missing required field", r.where("parameter"));
  s.parameter = *p;
  s.values = r.numbers("values");
  if (s.values.empty()) throw ConfigError("missing required field", r.where("values"));
  if (auto p2 = r.text("parameter2")) {
    s.parameter2 = *p2;
    s.values2 = r.numbers("values2");
    if (s.values2.empty()) throw ConfigError("missing required field", r.where("values2"));
  }
  if (auto mode = r.text("mode")) {
    if (*mode == "zip")
      s.zip = true;
    else if (*mode != "grid")
      throw ConfigError(fmt::format("unknown mode '{}' (grid, zip)", *mode), r.where("mode"));
  }
  if (s.zip && s.values.size() != s.values2.size())
    throw ConfigError("zip mode needs value lists of equal length", r.where("values2"));
  r.finish();
  c.sweep = std::move(s);
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + format_double(v[i]);
  return out;
}

std::string matrix_text(const Eigen::MatrixXd& M) {
  std::string out;
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    if (i) out += "; ";
    for (Eigen::Index j = 0; j < M.cols(); ++j) out += (j ? " " : "") + format_double(M(i, j));
  }
  return out;
}

}  // namespace

std::string format_double(double v) { return fmt::format("{}", v); }

IniDocument IniDocument::parse(std::string_view text, const std::string& origin) {
  IniDocument doc;
  doc.origin_ = origin;
  std::string section;
  int line_no = 0;
  size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    std::string line(text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
    ++line_no;
    start = end == std::string_view::npos ? text.size() + 1 : end + 1;

    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    // ';' also separates matrix rows, so it only starts a comment at line start.
    if (!line.empty() && line.front() == ';') line.clear();
    if (line.empty()) continue;
    const std::string where = fmt::format("{} line {}", origin, line_no);
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("unterminated section header", where);
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (!kSections.count(section))
        throw ConfigError(fmt::format("unknown section [{}] (plant, loop, scenario, sweep)", section), where);
      doc.sections_[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key = value", where);
    if (section.empty()) throw ConfigError("key outside of any section", where);
    const std::string key = trim(std::string_view(line).substr(0, eq));
    if (key.empty()) throw ConfigError("empty key", where);
    auto& entries = doc.sections_[section];
    if (entries.count(key)) throw ConfigError(fmt::format("duplicate key '{}'", key), where);
    entries[key] = {trim(std::string_view(line).substr(eq + 1)), line_no};
  }
  return doc;
}

IniDocument IniDocument::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file", path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.filename().string());
}

void IniDocument::set(std::string_view assignment) {
  const auto eq = assignment.find('=');
  const auto dot = assignment.find('.');
  if (eq == std::string_view::npos || dot == std::string_view::npos || dot > eq)
    throw ConfigError(fmt::format("expected section.key=value, got '{}'", assignment), "--set");
  set(trim(assignment.substr(0, dot)), trim(assignment.substr(dot + 1, eq - dot - 1)),
      trim(assignment.substr(eq + 1)));
}

void IniDocument::set(const std::string& section, const std::string& key, std::string value) {
  if (!kSections.count(section)) throw ConfigError(fmt::format("unknown section [{}]", section), "--set");
  sections_[section][key] = {std::move(value), 0};
}

Config resolve_config(const IniDocument& doc) {
  Config c;
  c.source = doc;
  c.plant = read_plant(doc);
  read_loop(doc, c);
  read_scenario(doc, c);
  read_sweep(doc, c);
  return c;
}

Config load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  IniDocument doc = IniDocument::load(path);
  for (const auto& o : overrides) doc.set(o);
  return resolve_config(doc);
}

std::string resolved_ini(const Config& c) {
  std::string out = "[plant]\n";
  const PlantModel& p = c.plant;
  switch (p.kind) {
    case PlantKind::short_period:
      out += "model = short_period\n";
      for (const char* k : {"Z_alpha", "Z_eta", "M_alpha", "M_q", "M_eta"})
        out += fmt::format("{} = {}\n", k, format_double(p.derivatives.at(k)));
      break;
    case PlantKind::roll:
      out += "model = roll\n";
      for (const char* k : {"L_p", "L_da"}) out += fmt::format("{} = {}\n", k, format_double(p.derivatives.at(k)));
      break;
    case PlantKind::generic:
      out += "model = generic\n";
      out += fmt::format("A = {}\nB = {}\nC = {}\ngust_input = {}\n", matrix_text(p.A),
                         matrix_text(p.B.transpose()), matrix_text(p.C), matrix_text(p.gust_input.transpose()));
      break;
  }
  const LoopConfig& l = c.loop;
  out += "\n[loop]\n";
  const double values[] = {l.K_p, l.K_v, l.K_r, l.T_act, l.tau_a, l.T_sensor, l.tau_s, l.T_diff, l.tau_am};
  for (size_t i = 0; i < kLoopKeys.size(); ++i) out += fmt::format("{} = {}\n", kLoopKeys[i], format_double(values[i]));
  out += fmt::format("B_hat = {}\nB_hat_scale = {}\n", format_double(l.B_hat / c.B_hat_scale), format_double(c.B_hat_scale));
  out += fmt::format("law = {}\npch = {}\ncomp_filter = {}\ncomp_sensor = {}\n",
                     l.law == ControlLaw::modified ? "modified" : "conventional", l.pch, l.comp_filter, l.comp_sensor);

  const ScenarioBattery& b = c.battery;
  out += "\n[scenario]\n";
  out += fmt::format("dt = {}\ntracking_duration = {}\ncommand_amplitude = {}\ncommand_interval = {}\n",
                     format_double(b.dt), format_double(b.tracking_duration), format_double(b.command_amplitude),
                     format_double(b.command_interval));
  out += fmt::format("disturbance_duration = {}\ngust_start = {}\ngust_dx = {}\ngust_dz = {}\n",
                     format_double(b.disturbance_duration), format_double(b.gust.start_time), format_double(b.gust.d_x),
                     format_double(b.gust.d_z));
  out += fmt::format("gust_um = {}\ngust_wm = {}\nairspeed = {}\n", format_double(b.gust.u_m),
                     format_double(b.gust.w_m), format_double(b.gust.V));
  out += fmt::format("noise_duration = {}\nnoise_variance = {}\nnoise_sample_rate = {}\n",
                     format_double(b.noise_duration), format_double(b.noise_variance),
                     format_double(b.noise_sample_rate));
  out += fmt::format("mc_samples = {}\nseed = {}\n", b.mc_samples, b.seed);
  for (const auto& [name, half] : b.uncertainty) out += fmt::format("uncertainty_{} = {}\n", name, format_double(half));
  std::vector<std::string> runs;
  const bool on[] = {b.tracking, b.disturbance, b.noise, b.robustness};
  for (size_t i = 0; i < 4; ++i)
    if (on[i]) runs.push_back(kScenarioNames[i]);
  out += fmt::format("scenarios = {}\n", fmt::join(runs, ", "));

  if (c.sweep) {
    const SweepSpec& s = *c.sweep;
    out += fmt::format("\n[sweep]\nparameter = {}\nvalues = {}\n", s.parameter, join(s.values));
    if (!s.parameter2.empty()) out += fmt::format("parameter2 = {}\nvalues2 = {}\n", s.parameter2, join(s.values2));
    out += fmt::format("mode = {}\n", s.zip ? "zip" : "grid");
  }
  return out;
}

Config with_parameter(const Config& cfg, const std::string& name, double value) {
  IniDocument doc = cfg.source;
  if (name.rfind("1/", 0) == 0) {
    const std::string key = name.substr(2);
    if (key != "T_act" && key != "T_sensor" && key != "T_diff")
      throw ConfigError(fmt::format("unknown sweep parameter '{}'", name), "[sweep] parameter");
    if (value == 0.0) throw ConfigError("reciprocal sweep value must be nonzero", name);
    doc.set("loop", key, format_double(1.0 / value));
  } else if (const auto dot = name.find('.'); dot != std::string::npos) {
    const std::string section = name.substr(0, dot);
    if (section != "plant" && section != "scenario" && section != "loop")
      throw ConfigError(fmt::format("unknown sweep parameter '{}'", name), "[sweep] parameter");
    const std::string key = name.substr(dot + 1);
    if (section == "plant" && !cfg.plant.derivatives.count(key))
      throw ConfigError(fmt::format("unknown sweep parameter '{}'", name), "[sweep] parameter");
    doc.set(section, key, format_double(value));
  } else if (std::find(kLoopKeys.begin(), kLoopKeys.end(), name) != kLoopKeys.end() || name == "B_hat_scale" ||
             name == "B_hat") {
    doc.set("loop", name, format_double(value));
  } else {
    throw ConfigError(fmt::format("unknown sweep parameter '{}'", name), "[sweep] parameter");
  }
  return resolve_config(doc);
}

}  // namespace indi
