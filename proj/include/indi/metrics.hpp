#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "indi/sim.hpp"
#include "indi/stability.hpp"

namespace indi {

/// Settings for the four evaluation runs. Each run can be switched off.
struct ScenarioBattery {
  double dt = 1e-4;
  double tracking_duration = 12.0;
  double command_amplitude = 10.0;  ///< deg/s
  double command_interval = 3.0;    ///< s
  double disturbance_duration = 10.0;
  GustSpec gust;
  double noise_duration = 10.0;
  double noise_variance = 4e-7;  ///< (rad/s)^2
  double noise_sample_rate = 0.0;
  int mc_samples = 100;
  std::uint64_t seed = 42;
  std::map<std::string, double> uncertainty{{"M_alpha", 0.2}, {"M_q", 0.2}, {"M_eta", 0.2}};

  bool tracking = true;
  bool disturbance = true;
  bool noise = true;
  bool robustness = true;

  SimScenario scenario(ScenarioKind kind) const;
};

/// RMS fields are absent when their run was not requested, NaN when it diverged.
struct MetricsReport {
  double GM_dB = 0.0;
  double PM_deg = 0.0;
  double TDM_s = 0.0;
  std::optional<double> RMSer, RMSur;  ///< deg/s, deg
  std::optional<double> RMSed, RMSud;
  std::optional<double> RMSen, RMSun;
  std::optional<double> sigma_RMSer;
  int mc_excluded = 0;
  std::vector<std::string> divergent;

  bool any_divergent() const noexcept { return !divergent.empty(); }
};

double rms(const std::vector<double>& v);
double rms_difference(const std::vector<double>& a, const std::vector<double>& b);
/// RMS of r - y over a trace.
double rms_tracking_error(const SimTrace& tr);
/// r - y, sample by sample.
std::vector<double> error_series(const SimTrace& tr);

struct RobustnessResult {
  double sigma = 0.0;            ///< population standard deviation of the kept samples, deg/s
  std::vector<double> samples;   ///< RMSer per sample, NaN where excluded
  int excluded = 0;
};

/// Monte-Carlo over plants perturbed uniformly within sc.uncertainty. Samples
/// run in parallel; sample i draws from its own stream derived from
/// (sc.mc_seed, i). B_hat stays at the nominal value.
RobustnessResult robustness_mc(const LoopConfig& cfg, const PlantModel& m, const SimScenario& sc);
RobustnessResult robustness_mc_serial(const LoopConfig& cfg, const PlantModel& m, const SimScenario& sc);

/// Plant for Monte-Carlo sample `index`.
PlantModel mc_sample_plant(const PlantModel& m, const SimScenario& sc, int index);

struct MetricsRun {
  MetricsReport report;
  std::map<std::string, SimTrace> traces;  ///< by scenario name; the noise baseline as "noise_baseline"
};

MetricsRun run_metrics(const LoopConfig& cfg, const PlantModel& m, const ScenarioBattery& battery,
                       FrequencyBand band = {});

}  // namespace indi
