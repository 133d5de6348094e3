#include "indi/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "indi/errors.hpp"

namespace indi {
namespace {

constexpr double kDeg = 180.0 / std::numbers::pi;
constexpr double kDivergence = 1e6;

struct Sample {
  double value = 0.0;
  double slope = 0.0;
};

// History of one signal at step boundaries. Entries before the first push
// (t < 0) read as zero.
class DelayLine {
 public:
  DelayLine() = default;
  DelayLine(long steps, double dt) : steps_(steps), dt_(dt), ring_(static_cast<size_t>(steps) + 2) {}

  long steps() const noexcept { return steps_; }

  void push(Sample s) {
    ring_[static_cast<size_t>(count_) % ring_.size()] = s;
    ++count_;
  }

  // Signal at (t_n + c dt) - steps*dt for the step n being integrated.
  Sample at(long n, double c) const {
    const Sample a = entry(n - steps_);
    if (c == 0.0) return a;
    const Sample b = entry(n - steps_ + 1);
    if (c == 1.0) return b;
    // Cubic Hermite on [0, 1] with slopes scaled by dt.
    const double h00 = 2 * c * c * c - 3 * c * c + 1, h10 = c * c * c - 2 * c * c + c;
    const double h01 = -2 * c * c * c + 3 * c * c, h11 = c * c * c - c * c;
    const double d00 = 6 * c * c - 6 * c, d10 = 3 * c * c - 4 * c + 1;
    const double d01 = -6 * c * c + 6 * c, d11 = 3 * c * c - 2 * c;
    return {h00 * a.value + h10 * dt_ * a.slope + h01 * b.value + h11 * dt_ * b.slope,
            (d00 * a.value + d01 * b.value) / dt_ + d10 * a.slope + d11 * b.slope};
  }

 private:
  Sample entry(long i) const {
    if (i < 0) return {};
    return ring_[static_cast<size_t>(i) % ring_.size()];
  }

  long steps_ = 0;
  double dt_ = 0.0;
  std::vector<Sample> ring_;
  long count_ = 0;
};

long delay_steps(double tau, double dt, const char* name) {
  const double k = std::round(tau / dt);
  if (std::abs(tau - k * dt) > 1e-9)
    throw ConfigError(fmt::format("delay {} s is not a whole number of dt = {} s steps", tau, dt), name);
  return static_cast<long>(k);
}

struct Signals {
  double y, y_m, u_c, u, u_hat, v_h, r;
};

class LoopSimulator {
 public:
  LoopSimulator(const LoopConfig& cfg, const PlantModel& m, const SimScenario& sc)
      : cfg_(cfg), m_(m), sc_(sc), n_(m.order()) {
    const double dt = sc.dt;
    gain_ = cfg.allocation_scale() / cfg.B_hat;
    act_ = DelayLine(delay_steps(cfg.tau_a, dt, "tau_a"), dt);
    sensor_ = DelayLine(delay_steps(cfg.tau_s, dt, "tau_s"), dt);
    meas_ = DelayLine(delay_steps(cfg.tau_a, dt, "tau_a") + delay_steps(cfg.tau_am, dt, "tau_am"), dt);
    // State layout: x (n), r, a, then optional ys, z, g1, g2.
    int next = n_;
    ir_ = next++;
    ia_ = next++;
    iys_ = cfg.T_sensor > 0.0 ? next++ : -1;
    iz_ = cfg.T_diff > 0.0 ? next++ : -1;
    if (cfg.comp_filter && cfg.T_diff > 0.0) ig_.push_back({next++, cfg.T_diff});
    if (cfg.comp_sensor && cfg.T_sensor > 0.0) ig_.push_back({next++, cfg.T_sensor});
    state_ = Eigen::VectorXd::Zero(next);
    if (sc.noise && sc.noise->variance > 0.0) {
      noise_.emplace(*sc.noise);
      const double rate = sc.noise->sample_rate;
      noise_hold_ = rate > 0.0 ? std::max<long>(1, std::lround(1.0 / (rate * dt))) : 1;
    }
  }

  SimTrace run() {
    const double dt = sc_.dt;
    const long steps = std::lround(sc_.duration / dt);
    const size_t stride = std::max<size_t>(1, sc_.record_stride);
    SimTrace tr;
    const size_t expected = static_cast<size_t>(steps) / stride + 1;
    for (auto* v : {&tr.time, &tr.command, &tr.r, &tr.y, &tr.y_m, &tr.u_c, &tr.u, &tr.u_hat, &tr.v_h}) v->reserve(expected);

    Eigen::VectorXd k1, k2, k3, k4, tmp;
    for (long n = 0; n <= steps; ++n) {
      const double t = static_cast<double>(n) * dt;
      if (noise_ && n % noise_hold_ == 0) noise_value_ = noise_->next();

      Signals sig{};
      k1 = derivative(state_, n, t, 0.0, &sig);
      push_history(state_, k1);
      if (static_cast<size_t>(n) % stride == 0) record(tr, t, sig);
      if (!std::isfinite(sig.y) || std::abs(sig.y) > kDivergence) {
        tr.divergence_time = t;
        break;
      }
      if (n == steps) break;

      tmp = state_ + 0.5 * dt * k1;
      k2 = derivative(tmp, n, t + 0.5 * dt, 0.5, nullptr);
      tmp = state_ + 0.5 * dt * k2;
      k3 = derivative(tmp, n, t + 0.5 * dt, 0.5, nullptr);
      tmp = state_ + dt * k3;
      k4 = derivative(tmp, n, t + dt, 1.0, nullptr);
      state_ += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return tr;
  }

 private:
  double output(const Eigen::VectorXd& X) const { return m_.C.dot(X.head(n_)); }

  double meas_source(const Eigen::VectorXd& X) const { return ig_.empty() ? X[ia_] : X[ig_.back().first]; }

  double sensor_source(const Eigen::VectorXd& X) const { return iys_ >= 0 ? X[iys_] : output(X); }

  // Reads a delayed signal; zero-step delays use the stage state itself.
  Sample delayed(const DelayLine& line, double current, double current_slope, long n, double c) const {
    if (line.steps() == 0) return {current, current_slope};
    return line.at(n, c);
  }

  Eigen::VectorXd derivative(const Eigen::VectorXd& X, long n, double t, double c, Signals* out) const {
    Eigen::VectorXd dX(X.size());
    const double y = output(X);

    // Actuator output at the plant (delay tau_a after the lag).
    const double u = act_.steps() == 0 ? X[ia_] : act_.at(n, c).value;
    const double d_in = sc_.input_disturbance ? sc_.input_disturbance(t) : 0.0;

    Eigen::VectorXd xdot = m_.A * X.head(n_) + m_.B * (u + d_in);
    if (sc_.gust) xdot += m_.gust_input * (gust_profile(t, *sc_.gust).w_g / sc_.gust->V);
    dX.head(n_) = xdot;
    const double ydot = m_.C.dot(xdot);

    // Sensor: lag then delay, noise on the sensed value.
    double sensor_slope_now = ydot;
    if (iys_ >= 0) {
      sensor_slope_now = (y - X[iys_]) / cfg_.T_sensor;
      dX[iys_] = sensor_slope_now;
    }
    const Sample sensed = delayed(sensor_, sensor_source(X), sensor_slope_now, n, c);
    const double y_m = sensed.value + noise_value_;

    double ydot_f = sensed.slope;
    if (iz_ >= 0) {
      ydot_f = (y_m - X[iz_]) / cfg_.T_diff;
      dX[iz_] = ydot_f;
    }

    // Actuator-measurement path: compensation lags on the actuator state, then delay.
    double upstream = X[ia_];
    for (const auto& [idx, T] : ig_) {
      dX[idx] = (upstream - X[idx]) / T;
      upstream = X[idx];
    }
    const double u_hat = meas_.steps() == 0 ? meas_source(X) : meas_.at(n, c).value;

    const double cmd = sc_.command_at(t) / kDeg;
    const double r = X[ir_];
    const double v_r = cfg_.K_r * (cmd - r);
    const double v_c = v_r + cfg_.K_p * (r - y_m);
    const double u_c = u_hat + gain_ * (v_c - ydot_f);
    const double v_h = cfg_.pch ? cfg_.B_hat * (u_c - u_hat) : 0.0;
    dX[ir_] = v_r - v_h;
    dX[ia_] = (u_c - X[ia_]) / cfg_.T_act;

    if (out) *out = {y, y_m, u_c, u, u_hat, v_h, r};
    return dX;
  }

  void push_history(const Eigen::VectorXd& X, const Eigen::VectorXd& dX) {
    if (act_.steps() > 0) act_.push({X[ia_], dX[ia_]});
    if (meas_.steps() > 0) {
      const int idx = ig_.empty() ? ia_ : ig_.back().first;
      meas_.push({X[idx], dX[idx]});
    }
    if (sensor_.steps() > 0) {
      if (iys_ >= 0)
        sensor_.push({X[iys_], dX[iys_]});
      else
        sensor_.push({output(X), m_.C.dot(dX.head(n_))});
    }
  }

  void record(SimTrace& tr, double t, const Signals& s) const {
    tr.time.push_back(t);
    tr.command.push_back(sc_.command_at(t));
    tr.r.push_back(s.r * kDeg);
    tr.y.push_back(s.y * kDeg);
    tr.y_m.push_back(s.y_m * kDeg);
    tr.u_c.push_back(s.u_c * kDeg);
    tr.u.push_back(s.u * kDeg);
    tr.u_hat.push_back(s.u_hat * kDeg);
    tr.v_h.push_back(s.v_h * kDeg);
  }

  const LoopConfig& cfg_;
  const PlantModel& m_;
  const SimScenario& sc_;
  int n_;
  double gain_ = 0.0;
  DelayLine act_, sensor_, meas_;
  int ir_ = 0, ia_ = 0, iys_ = -1, iz_ = -1;
  std::vector<std::pair<int, double>> ig_;
  Eigen::VectorXd state_;
  std::optional<NoiseGenerator> noise_;
  long noise_hold_ = 1;
  double noise_value_ = 0.0;
};

}  // namespace

const char* to_string(ScenarioKind k) noexcept {
  switch (k) {
    case ScenarioKind::tracking: return "tracking";
    case ScenarioKind::disturbance: return "disturbance";
    case ScenarioKind::noise: return "noise";
    case ScenarioKind::robustness: return "robustness";
  }
  return "?";
}

void SimScenario::validate(const LoopConfig& cfg) const {
  if (!(dt > 0.0)) throw ConfigError("must be > 0", "dt");
  if (!(duration >= 10.0 * dt)) throw ConfigError("must be at least 10 dt", "duration");
  if (!(cfg.T_act > 0.0)) throw ConfigError("the simulator needs an actuator lag (T_act > 0)", "T_act");
  double fastest = cfg.T_act;
  if (cfg.T_diff > 0.0) fastest = std::min(fastest, cfg.T_diff);
  if (cfg.T_sensor > 0.0) fastest = std::min(fastest, cfg.T_sensor);
  if (dt > fastest / 10.0 * (1.0 + 1e-12))
    throw ConfigError(fmt::format("must not exceed a tenth of the fastest lag ({} s)", fastest), "dt");
  delay_steps(cfg.tau_a, dt, "tau_a");
  delay_steps(cfg.tau_s, dt, "tau_s");
  delay_steps(cfg.tau_am, dt, "tau_am");
  if (!(command_interval > 0.0)) throw ConfigError("must be > 0", "command_interval");
  if (gust) gust->validate();
  if (noise) {
    if (!(noise->variance >= 0.0)) throw ConfigError("must be >= 0", "noise_variance");
    if (noise->variance > 0.0 && !(cfg.T_diff > 0.0))
      throw ConfigError("measurement noise needs a derivative filter (T_diff > 0)", "T_diff");
  }
}

double SimScenario::command_at(double t) const {
  if (kind != ScenarioKind::tracking && kind != ScenarioKind::robustness) return 0.0;
  if (command) return command(t);
  return command_square(t, command_amplitude, command_interval);
}

SimTrace simulate(const LoopConfig& cfg, const PlantModel& m, const SimScenario& sc) {
  cfg.validate();
  sc.validate(cfg);
  return LoopSimulator(cfg, m, sc).run();
}

}  // namespace indi
