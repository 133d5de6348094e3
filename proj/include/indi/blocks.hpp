#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "indi/tf_expr.hpp"

namespace indi {

enum class ControlLaw { conventional, modified };

/// Controller and hardware parameters of the incremental loop. Gains in 1/s,
/// time constants and delays in seconds, B_hat in plant units.
struct LoopConfig {
  double K_p = 0.0;       ///< error gain
  double K_v = 0.0;       ///< pseudo-control gain (modified law)
  double K_r = 1.0;       ///< reference-model bandwidth
  double T_act = 0.0;     ///< actuator lag
  double tau_a = 0.0;     ///< actuator delay
  double T_sensor = 0.0;  ///< sensor lag
  double tau_s = 0.0;     ///< sensor delay
  double T_diff = 0.0;    ///< derivative filter lag
  double tau_am = 0.0;    ///< actuator-measurement delay
  double B_hat = 1.0;     ///< control effectiveness estimate
  ControlLaw law = ControlLaw::modified;
  bool pch = false;
  bool comp_filter = false;  ///< filter lag copied into the actuator-measurement path
  bool comp_sensor = false;  ///< sensor lag copied into the actuator-measurement path

  /// Throws ConfigError naming the offending field.
  void validate() const;
  /// Soft checks (K_v above 1/T_act); one message per finding.
  std::vector<std::string> warnings() const;
  /// Gain between pseudo-control error and B_hat * Delta u: T_act*K_v, or 1
  /// for the conventional law.
  double allocation_scale() const noexcept { return law == ControlLaw::conventional ? 1.0 : T_act * K_v; }
  double sensor_path_delay() const noexcept { return tau_a + tau_s; }
  double measurement_path_delay() const noexcept { return tau_a + tau_am; }
};

/// 1 / (T s + 1); T = 0 gives 1.
Rational first_order_lag(double T);

struct LoopBlocks {
  TFExpr Ga;   ///< actuator
  TFExpr H;    ///< sensor
  TFExpr F;    ///< derivative filter
  TFExpr Gam;  ///< actuator-measurement path
};

LoopBlocks block_tfs(const LoopConfig& cfg);

/// 1 - cos discrete gust. Distances in m, velocities in m/s.
struct GustSpec {
  double d_x = 120.0;
  double d_z = 80.0;
  double u_m = 3.5;
  double w_m = 3.0;
  double V = 40.0;
  double start_time = 3.0;

  void validate() const;
};

struct GustVelocity {
  double u_g = 0.0;
  double w_g = 0.0;
};

/// Gust components at time t; zero before start_time and past each gradient distance.
GustVelocity gust_profile(double t, const GustSpec& g);

/// Two-way square wave starting at +amplitude.
double command_square(double t, double amplitude, double interval);

struct NoiseSpec {
  double variance = 0.0;  ///< (rad/s)^2 on the measured output
  std::uint64_t seed = 1;
  double sample_rate = 0.0;  ///< Hz; 0 means one sample per integration step
};

/// Gaussian white-noise source. Value type: copying forks the stream.
class NoiseGenerator {
 public:
  explicit NoiseGenerator(const NoiseSpec& spec, std::uint64_t stream = 0);
  double next();
  double stddev() const noexcept { return stddev_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  double stddev_;
};

/// Seed for run `index` of a family seeded with `seed` (splitmix64 mixing).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

}  // namespace indi
