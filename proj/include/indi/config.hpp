#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "indi/blocks.hpp"
#include "indi/metrics.hpp"
#include "indi/plant.hpp"

namespace indi {

/// Raw INI contents: section -> key -> value, with the source line of each key.
class IniDocument {
 public:
  struct Entry {
    std::string value;
    int line = 0;  ///< 0 for values set from the command line
  };

  static IniDocument parse(std::string_view text, const std::string& origin = "config");
  static IniDocument load(const std::filesystem::path& path);

  /// "section.key=value"; throws ConfigError on malformed input.
  void set(std::string_view assignment);
  void set(const std::string& section, const std::string& key, std::string value);

  const std::map<std::string, std::map<std::string, Entry>>& sections() const noexcept { return sections_; }
  const std::string& origin() const noexcept { return origin_; }

 private:
  std::string origin_;
  std::map<std::string, std::map<std::string, Entry>> sections_;
};

struct SweepSpec {
  std::string parameter;
  std::vector<double> values;
  std::string parameter2;  ///< empty for one-parameter sweeps
  std::vector<double> values2;
  bool zip = false;  ///< pair values element-wise instead of the full grid
};

struct Config {
  PlantModel plant;
  LoopConfig loop;
  ScenarioBattery battery;
  std::optional<SweepSpec> sweep;
  double B_hat_scale = 1.0;
  IniDocument source;
};

/// Interprets a document. Unknown sections or keys, missing required keys and
/// unparsable values throw ConfigError naming the key and its line.
Config resolve_config(const IniDocument& doc);
Config load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

/// Every parameter with defaults materialized, as INI text. Parsing it back
/// yields the same Config.
std::string resolved_ini(const Config& cfg);

/// Names accepted by sweeps: loop keys, "plant.<key>", "scenario.<key>" and
/// the reciprocal forms 1/T_act, 1/T_sensor, 1/T_diff.
Config with_parameter(const Config& cfg, const std::string& name, double value);

std::string format_double(double v);

}  // namespace indi
