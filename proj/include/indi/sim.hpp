#pragma once

#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "indi/blocks.hpp"
#include "indi/plant.hpp"

namespace indi {

enum class ScenarioKind { tracking, disturbance, noise, robustness };

const char* to_string(ScenarioKind k) noexcept;

struct SimScenario {
  ScenarioKind kind = ScenarioKind::tracking;
  double duration = 12.0;  ///< s
  double dt = 1e-4;        ///< s
  double command_amplitude = 10.0;  ///< deg/s
  double command_interval = 3.0;    ///< s
  std::optional<GustSpec> gust;
  std::optional<NoiseSpec> noise;
  int mc_samples = 100;
  std::uint64_t mc_seed = 42;
  /// Relative half-widths of the uniform perturbation per plant derivative.
  std::map<std::string, double> uncertainty;

  /// Replaces the square wave (deg/s). Tracking runs only.
  std::function<double(double)> command;
  /// Additive plant-input disturbance (rad), any scenario.
  std::function<double(double)> input_disturbance;
  /// Keep every n-th step in the trace.
  size_t record_stride = 1;

  /// Throws ConfigError.
  void validate(const LoopConfig& cfg) const;
  /// Command at t in deg/s (zero outside tracking runs).
  double command_at(double t) const;
};

/// Time histories in degrees (rates in deg/s).
struct SimTrace {
  std::vector<double> time;
  std::vector<double> command;
  std::vector<double> r;    ///< reference-model state
  std::vector<double> y;    ///< plant output
  std::vector<double> y_m;  ///< measured output
  std::vector<double> u_c;  ///< commanded deflection
  std::vector<double> u;    ///< actuator output
  std::vector<double> u_hat;  ///< actuator-measurement path output
  std::vector<double> v_h;  ///< hedge signal, deg/s^2
  double divergence_time = std::numeric_limits<double>::quiet_NaN();

  bool diverged() const noexcept { return divergence_time == divergence_time; }
  size_t size() const noexcept { return time.size(); }
};

/// Fixed-step RK4 run of the full loop from rest. Lags are integrated as
/// states; transport delays read their inputs from per-step history with
/// cubic Hermite interpolation at half steps. Stops at |y| > 1e6.
SimTrace simulate(const LoopConfig& cfg, const PlantModel& m, const SimScenario& sc);

}  // namespace indi
