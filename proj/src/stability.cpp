#include "indi/stability.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "indi/errors.hpp"
#include "indi/frequency.hpp"
#include "indi/roots.hpp"
#include "indi/routh.hpp"

namespace indi {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kBisectIterations = 200;

double rad2deg(double r) { return r * 180.0 / kPi; }

double wrap_deg(double d) {
  double w = std::fmod(d, 360.0);
  if (w <= -180.0) w += 360.0;
  if (w > 180.0) w -= 360.0;
  return w;
}

// Geometric bisection of a sign change of f between a and b.
template <class F>
double bisect_log(double a, double b, double fa, F&& f) {
  for (int i = 0; i < kBisectIterations && b / a - 1.0 > 1e-13; ++i) {
    const double m = std::sqrt(a * b);
    const double fm = f(m);
    if ((fm < 0.0) == (fa < 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return std::sqrt(a * b);
}

CellVerdict classify(const TFExpr& loop, double& max_re) {
  try {
    max_re = max_real_part(loop_characteristic_polynomial(loop));
  } catch (const RootFindingError&) {
    max_re = std::numeric_limits<double>::quiet_NaN();
    return CellVerdict::indeterminate;
  } catch (const SingularStructure&) {
    max_re = std::numeric_limits<double>::quiet_NaN();
    return CellVerdict::indeterminate;
  }
  return max_re < kStabilityGuard ? CellVerdict::stable : CellVerdict::unstable;
}

StabilityGrid empty_grid(std::span<const double> tau1s, std::span<const double> tau2s) {
  if (tau1s.empty() || tau2s.empty()) throw std::invalid_argument("stability grid: empty axis");
  for (double t : tau1s)
    if (!(t >= 0.0)) throw std::invalid_argument("stability grid: delays must be >= 0");
  for (double t : tau2s)
    if (!(t >= 0.0)) throw std::invalid_argument("stability grid: delays must be >= 0");
  StabilityGrid g;
  g.tau1.assign(tau1s.begin(), tau1s.end());
  g.tau2.assign(tau2s.begin(), tau2s.end());
  g.verdict.assign(g.tau1.size() * g.tau2.size(), CellVerdict::indeterminate);
  g.max_real_part.assign(g.verdict.size(), std::numeric_limits<double>::quiet_NaN());
  return g;
}

}  // namespace

double MarginReport::gain_margin_db() const { return 20.0 * std::log10(gain_margin); }

MarginReport margins(const TFExpr& loop, FrequencyBand band, size_t points) {
  if (!(band.lo > 0.0) || !(band.hi > band.lo)) throw std::invalid_argument("margins: need 0 < lo < hi");
  points = std::max<size_t>(points, 801);
  const auto omegas = log_space(band.lo, band.hi, points);
  const auto fr = freq_response(loop, omegas);
  const auto track = phase_track(loop, omegas, fr.value);

  MarginReport rep;
  double best_tdm = std::numeric_limits<double>::infinity();
  double min_inverse_gain = std::numeric_limits<double>::infinity();

  for (size_t i = 0; i + 1 < track.size(); ++i) {
    const PhaseSample& a = track[i];
    const PhaseSample& b = track[i + 1];

    const double ga = std::log(std::abs(a.value));
    const double gb = std::log(std::abs(b.value));
    if ((ga >= 0.0) != (gb >= 0.0)) {
      const double w =
          bisect_log(a.omega, b.omega, ga, [&](double x) { return std::log(std::abs(eval_exact(loop, x))); });
      const auto v = eval_exact(loop, w);
      const double pm = wrap_deg(180.0 + rad2deg(phase_near(a, v)));
      const double tdm = pm * kPi / 180.0 / w;
      rep.gain_crossovers.push_back(w);
      if (tdm < best_tdm) {
        best_tdm = tdm;
        rep.phase_margin = pm;
        rep.time_delay_margin = tdm;
        rep.gain_crossover = w;
      }
    }

    // Phase crossovers where the unwrapped phase passes -pi + 2 pi k.
    const double lo = std::min(a.phase, b.phase);
    const double hi = std::max(a.phase, b.phase);
    for (double k = std::ceil((lo + kPi) / (2.0 * kPi)); -kPi + 2.0 * kPi * k <= hi; k += 1.0) {
      const double target = -kPi + 2.0 * kPi * k;
      const double fa = a.phase - target;
      if ((fa >= 0.0) == (b.phase - target >= 0.0)) continue;
      const double w =
          bisect_log(a.omega, b.omega, fa, [&](double x) { return phase_near(a, eval_exact(loop, x)) - target; });
      rep.phase_crossovers.push_back(w);
      min_inverse_gain = std::min(min_inverse_gain, 1.0 / std::abs(eval_exact(loop, w)));
    }
  }
  rep.gain_margin = min_inverse_gain;
  return rep;
}

MarginReport roll_margins_closed_form(double K_p, double K_v, double L_p, double effectiveness_ratio) {
  if (!(K_p > 0.0) || !(K_v > 0.0)) throw std::invalid_argument("roll_margins_closed_form: K_p, K_v must be > 0");
  if (!(effectiveness_ratio > 0.0)) throw std::invalid_argument("roll_margins_closed_form: ratio must be > 0");
  const double kv = K_v / effectiveness_ratio;
  const double b = kv * kv - L_p * L_p;
  const double wc = std::sqrt(0.5 * (b + std::sqrt(b * b + 4.0 * kv * kv * K_p * K_p)));
  MarginReport rep;
  rep.gain_crossover = wc;
  rep.gain_crossovers = {wc};
  const double pm = std::atan(wc / K_p) - std::atan(L_p / wc);
  rep.phase_margin = rad2deg(pm);
  rep.time_delay_margin = pm / wc;
  return rep;
}

Polynomial sync_delay_char_poly(const LoopConfig& cfg, const PlantModel& m, double tau1) {
  cfg.validate();
  if (!(tau1 >= 0.0)) throw std::domain_error("sync_delay_char_poly: tau1 must be >= 0");
  if (!(cfg.T_act > 0.0)) throw std::invalid_argument("sync_delay_char_poly: T_act must be > 0");
  const double cb = m.cb();
  if (std::abs(cfg.B_hat - cb) > 1e-12 * std::abs(cb))
    throw std::invalid_argument("sync_delay_char_poly: requires B_hat == CB");
  const Rational P = plant_tf(m);
  const Polynomial& D = P.denominator();
  const Polynomial N = P.numerator() * (1.0 / cfg.B_hat);
  const double gain = cfg.allocation_scale() / cfg.T_act;
  const Polynomial error{cfg.K_p, 1.0};
  const Polynomial s{0.0, 1.0};
  if (tau1 == 0.0) return D * s + gain * error * N;
  const double t = tau1;
  const Polynomial lag{12.0, 6.0 * t, t * t};
  const Polynomial lead{12.0, -6.0 * t, t * t};
  return D * (s * lag + Polynomial{0.0, 12.0 * t / cfg.T_act}) + gain * error * lead * N;
}

double sync_delay_bound(double K_p, double K_v, double L_p, double T_act) {
  if (!(T_act > 0.0)) throw std::invalid_argument("sync_delay_bound: T_act must be > 0");
  const double den = K_p * K_v + 2.0 * L_p / T_act;
  if (den <= 0.0) return std::numeric_limits<double>::infinity();
  return (2.0 * K_v - 2.0 * L_p) / den;
}

double sync_delay_limit(const LoopConfig& cfg, const PlantModel& m, double tau_max) {
  auto stable = [&](double t) { return routh_stable(sync_delay_char_poly(cfg, m, t)).stable; };
  if (!stable(0.0)) return 0.0;
  constexpr int kScan = 2000;
  double prev = 0.0;
  for (int i = 1; i <= kScan; ++i) {
    const double t = tau_max * i / kScan;
    if (!stable(t)) {
      double lo = prev, hi = t;
      while (hi - lo > 1e-12 * hi) {
        const double mid = 0.5 * (lo + hi);
        (stable(mid) ? lo : hi) = mid;
      }
      return 0.5 * (lo + hi);
    }
    prev = t;
  }
  return std::numeric_limits<double>::infinity();
}

Polynomial loop_characteristic_polynomial(const TFExpr& loop) {
  const Rational r = rationalize(loop);
  return r.numerator() + r.denominator();
}

size_t StabilityGrid::stable_count() const {
  return static_cast<size_t>(std::count(verdict.begin(), verdict.end(), CellVerdict::stable));
}

StabilityGrid delay_stability_grid(const LoopConfig& cfg, const PlantModel& m, std::span<const double> tau1s,
                                   std::span<const double> tau2s) {
  StabilityGrid g = empty_grid(tau1s, tau2s);
  const auto cols = g.tau2.size();
  const auto cells = static_cast<std::ptrdiff_t>(g.verdict.size());
  cfg.validate();
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t c = 0; c < cells; ++c) {
    const auto idx = static_cast<size_t>(c);
    const TFExpr loop = open_loop_path_delays(cfg, m, g.tau1[idx / cols], g.tau2[idx % cols]);
    g.verdict[idx] = classify(loop, g.max_real_part[idx]);
  }
  return g;
}

StabilityGrid delay_stability_grid_serial(const LoopConfig& cfg, const PlantModel& m, std::span<const double> tau1s,
                                          std::span<const double> tau2s) {
  StabilityGrid g = empty_grid(tau1s, tau2s);
  const auto cols = g.tau2.size();
  for (size_t idx = 0; idx < g.verdict.size(); ++idx) {
    const TFExpr loop = open_loop_path_delays(cfg, m, g.tau1[idx / cols], g.tau2[idx % cols]);
    g.verdict[idx] = classify(loop, g.max_real_part[idx]);
  }
  return g;
}

CompensationReport compensation_compare(const LoopConfig& cfg, const PlantModel& m, std::span<const double> omegas,
                                        FrequencyBand band) {
  if (!(cfg.T_sensor > 0.0) || !(cfg.T_diff > 0.0))
    throw std::invalid_argument("compensation_compare: needs T_sensor > 0 and T_diff > 0");
  TFExpr loops[3];
  const bool flags[3][2] = {{false, false}, {true, false}, {true, true}};
  CompensationReport rep;
  for (int v = 0; v < 3; ++v) {
    LoopConfig c = cfg;
    c.comp_filter = flags[v][0];
    c.comp_sensor = flags[v][1];
    loops[v] = open_loop(c, m);
    rep.variant[v] = margins(loops[v], band);
  }
  for (double w : omegas) {
    const auto l1 = eval_exact(loops[0], w), l2 = eval_exact(loops[1], w), l3 = eval_exact(loops[2], w);
    if (!(std::abs(l1) > std::abs(l2) && std::abs(l2) > std::abs(l3)))
      rep.magnitude_violations.push_back({w, std::abs(l1), std::abs(l2), std::abs(l3)});
    if (!(std::arg(l3 / l2) > 0.0 && std::arg(l2 / l1) > 0.0))
      rep.phase_violations.push_back({w, rad2deg(std::arg(l1)), rad2deg(std::arg(l2)), rad2deg(std::arg(l3))});
  }
  const auto& r = rep.variant;
  rep.gm_nondecreasing = r[0].gain_margin <= r[1].gain_margin && r[1].gain_margin <= r[2].gain_margin;
  rep.pm_nondecreasing = r[0].phase_margin <= r[1].phase_margin && r[1].phase_margin <= r[2].phase_margin;
  rep.tdm_nondecreasing =
      r[0].time_delay_margin <= r[1].time_delay_margin && r[1].time_delay_margin <= r[2].time_delay_margin;
  return rep;
}

}  // namespace indi
