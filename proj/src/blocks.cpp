#include "indi/blocks.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "indi/errors.hpp"

namespace indi {
namespace {

void require_nonnegative(double v, const char* name) {
  if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError(fmt::format("must be a finite value >= 0, got {}", v), name);
}

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) throw ConfigError("must be finite", name);
}

}  // namespace

void LoopConfig::validate() const {
  require_finite(K_p, "K_p");
  require_finite(K_v, "K_v");
  require_finite(B_hat, "B_hat");
  if (!(K_r > 0.0) || !std::isfinite(K_r)) throw ConfigError(fmt::format("must be > 0, got {}", K_r), "K_r");
  require_nonnegative(T_act, "T_act");
  require_nonnegative(tau_a, "tau_a");
  require_nonnegative(T_sensor, "T_sensor");
  require_nonnegative(tau_s, "tau_s");
  require_nonnegative(T_diff, "T_diff");
  require_nonnegative(tau_am, "tau_am");
  if (B_hat == 0.0) throw ConfigError("must be nonzero", "B_hat");
}

std::vector<std::string> LoopConfig::warnings() const {
  std::vector<std::string> out;
  if (law == ControlLaw::modified && T_act > 0.0 && K_v > 1.0 / T_act)
    out.push_back(fmt::format("K_v = {} exceeds 1/T_act = {}", K_v, 1.0 / T_act));
  return out;
}

namespace {

TFExpr delayed(double tau, Rational r) {
  if (tau == 0.0) return r;
  return TFExpr::delay(tau) * TFExpr(std::move(r));
}

}  // namespace

Rational first_order_lag(double T) {
  if (T == 0.0) return Rational(1.0);
  return {Polynomial{1.0}, Polynomial{1.0, T}};
}

LoopBlocks block_tfs(const LoopConfig& cfg) {
  LoopBlocks b;
  b.Ga = delayed(cfg.tau_a, first_order_lag(cfg.T_act));
  b.H = delayed(cfg.tau_s, first_order_lag(cfg.T_sensor));
  b.F = first_order_lag(cfg.T_diff);
  Rational am(1.0);
  if (cfg.comp_filter) am *= first_order_lag(cfg.T_diff);
  if (cfg.comp_sensor) am *= first_order_lag(cfg.T_sensor);
  b.Gam = delayed(cfg.tau_am, std::move(am));
  return b;
}

void GustSpec::validate() const {
  if (!(d_x > 0.0)) throw ConfigError("must be > 0", "gust_dx");
  if (!(d_z > 0.0)) throw ConfigError("must be > 0", "gust_dz");
  if (!(V > 0.0)) throw ConfigError("must be > 0", "airspeed");
  if (!(u_m >= 0.0)) throw ConfigError("must be >= 0", "gust_um");
  if (!(w_m >= 0.0)) throw ConfigError("must be >= 0", "gust_wm");
}

GustVelocity gust_profile(double t, const GustSpec& g) {
  const double x = g.V * (t - g.start_time);
  auto lobe = [x](double peak, double d) {
    if (x < 0.0 || x > d) return 0.0;
    return 0.5 * peak * (1.0 - std::cos(std::numbers::pi * x / d));
  };
  return {lobe(g.u_m, g.d_x), lobe(g.w_m, g.d_z)};
}

double command_square(double t, double amplitude, double interval) {
  if (!(interval > 0.0)) throw std::invalid_argument("command_square: interval must be > 0");
  const auto half = static_cast<long long>(std::floor(t / interval));
  return half % 2 == 0 ? amplitude : -amplitude;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

NoiseGenerator::NoiseGenerator(const NoiseSpec& spec, std::uint64_t stream)
    : engine_(derive_seed(spec.seed, stream)), stddev_(std::sqrt(spec.variance)) {
  if (!(spec.variance >= 0.0)) throw ConfigError("must be >= 0", "noise_variance");
}

double NoiseGenerator::next() { return stddev_ * normal_(engine_); }

}  // namespace indi
