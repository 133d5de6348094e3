#include "indi/metrics.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "indi/roots.hpp"

namespace indi {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Loop stability of a sampled plant, delays through Padé.
bool loop_stable(const LoopConfig& cfg, const PlantModel& m) {
  try {
    return max_real_part(loop_characteristic_polynomial(open_loop(cfg, m))) < kStabilityGuard;
  } catch (const std::exception&) {
    return false;
  }
}

double sample_rms(const LoopConfig& cfg, const PlantModel& m, const SimScenario& sc, int index) {
  const PlantModel p = mc_sample_plant(m, sc, index);
  if (!loop_stable(cfg, p)) return kNaN;
  const SimTrace tr = simulate(cfg, p, sc);
  return tr.diverged() ? kNaN : rms_tracking_error(tr);
}

RobustnessResult summarize(std::vector<double> samples) {
  RobustnessResult res;
  double sum = 0.0;
  int kept = 0;
  for (double v : samples) {
    if (std::isnan(v)) {
      ++res.excluded;
    } else {
      sum += v;
      ++kept;
    }
  }
  if (kept == 0) {
    res.sigma = kNaN;
  } else {
    const double mean = sum / kept;
    double ss = 0.0;
    for (double v : samples)
      if (!std::isnan(v)) ss += (v - mean) * (v - mean);
    res.sigma = std::sqrt(ss / kept);
  }
  res.samples = std::move(samples);
  return res;
}

void check_mc(const SimScenario& sc) {
  if (sc.mc_samples < 2) throw std::invalid_argument("robustness_mc: needs at least 2 samples");
}

}  // namespace

SimScenario ScenarioBattery::scenario(ScenarioKind kind) const {
  SimScenario sc;
  sc.kind = kind;
  sc.dt = dt;
  sc.command_amplitude = command_amplitude;
  sc.command_interval = command_interval;
  sc.mc_samples = mc_samples;
  sc.mc_seed = seed;
  sc.uncertainty = uncertainty;
  switch (kind) {
    case ScenarioKind::tracking:
    case ScenarioKind::robustness:
      sc.duration = tracking_duration;
      break;
    case ScenarioKind::disturbance:
      sc.duration = disturbance_duration;
      sc.gust = gust;
      break;
    case ScenarioKind::noise:
      sc.duration = noise_duration;
      sc.noise = NoiseSpec{noise_variance, seed, noise_sample_rate};
      break;
  }
  return sc;
}

double rms(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double ss = 0.0;
  for (double x : v) ss += x * x;
  return std::sqrt(ss / static_cast<double>(v.size()));
}

double rms_difference(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("rms_difference: length mismatch");
  if (a.empty()) return 0.0;
  double ss = 0.0;
  for (size_t i = 0; i < a.size(); ++i) ss += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(ss / static_cast<double>(a.size()));
}

double rms_tracking_error(const SimTrace& tr) { return rms_difference(tr.r, tr.y); }

std::vector<double> error_series(const SimTrace& tr) {
  std::vector<double> e(tr.size());
  for (size_t i = 0; i < e.size(); ++i) e[i] = tr.r[i] - tr.y[i];
  return e;
}

PlantModel mc_sample_plant(const PlantModel& m, const SimScenario& sc, int index) {
  std::mt19937_64 rng(derive_seed(sc.mc_seed, static_cast<std::uint64_t>(index)));
  std::map<std::string, double> rel;
  for (const auto& [name, half] : sc.uncertainty) {
    std::uniform_real_distribution<double> u(-half, half);
    rel[name] = half > 0.0 ? u(rng) : 0.0;
  }
  return perturb_plant(m, rel);
}

RobustnessResult robustness_mc(const LoopConfig& cfg, const PlantModel& m, const SimScenario& sc) {
  check_mc(sc);
  cfg.validate();
  sc.validate(cfg);
  mc_sample_plant(m, sc, 0);  // surfaces unknown derivative names before the fan-out
  std::vector<double> samples(static_cast<size_t>(sc.mc_samples));
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < sc.mc_samples; ++i) {
    try {
      samples[static_cast<size_t>(i)] = sample_rms(cfg, m, sc, i);
    } catch (...) {
#pragma omp critical(indi_mc_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return summarize(std::move(samples));
}

RobustnessResult robustness_mc_serial(const LoopConfig& cfg, const PlantModel& m, const SimScenario& sc) {
  check_mc(sc);
  cfg.validate();
  sc.validate(cfg);
  std::vector<double> samples;
  samples.reserve(static_cast<size_t>(sc.mc_samples));
  for (int i = 0; i < sc.mc_samples; ++i) samples.push_back(sample_rms(cfg, m, sc, i));
  return summarize(std::move(samples));
}

MetricsRun run_metrics(const LoopConfig& cfg, const PlantModel& m, const ScenarioBattery& battery,
                       FrequencyBand band) {
  MetricsRun run;
  auto& rep = run.report;
  const MarginReport mr = margins(open_loop(cfg, m), band);
  rep.GM_dB = mr.gain_margin_db();
  rep.PM_deg = mr.phase_margin;
  rep.TDM_s = mr.time_delay_margin;

  auto flag = [&](const SimTrace& tr, const char* name) {
    if (tr.diverged()) rep.divergent.emplace_back(name);
    return tr.diverged();
  };

  if (battery.tracking) {
    auto tr = simulate(cfg, m, battery.scenario(ScenarioKind::tracking));
    const bool bad = flag(tr, "tracking");
    rep.RMSer = bad ? kNaN : rms_tracking_error(tr);
    rep.RMSur = bad ? kNaN : rms(tr.u);
    run.traces.emplace("tracking", std::move(tr));
  }
  if (battery.disturbance) {
    auto tr = simulate(cfg, m, battery.scenario(ScenarioKind::disturbance));
    const bool bad = flag(tr, "disturbance");
    rep.RMSed = bad ? kNaN : rms_tracking_error(tr);
    rep.RMSud = bad ? kNaN : rms(tr.u);
    run.traces.emplace("disturbance", std::move(tr));
  }
  if (battery.noise) {
    SimScenario sc = battery.scenario(ScenarioKind::noise);
    auto noisy = simulate(cfg, m, sc);
    sc.noise.reset();
    auto base = simulate(cfg, m, sc);
    const bool bad = flag(noisy, "noise") || flag(base, "noise_baseline");
    rep.RMSen = bad ? kNaN : rms_difference(error_series(noisy), error_series(base));
    rep.RMSun = bad ? kNaN : rms_difference(noisy.u, base.u);
    run.traces.emplace("noise", std::move(noisy));
    run.traces.emplace("noise_baseline", std::move(base));
  }
  if (battery.robustness) {
    const auto mc = robustness_mc(cfg, m, battery.scenario(ScenarioKind::robustness));
    rep.sigma_RMSer = mc.sigma;
    rep.mc_excluded = mc.excluded;
    if (std::isnan(mc.sigma)) rep.divergent.emplace_back("robustness");
  }
  return run;
}

}  // namespace indi
