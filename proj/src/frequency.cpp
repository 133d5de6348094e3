#include "indi/frequency.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace indi {
namespace {

constexpr double kMaxPhaseStep = std::numbers::pi / 4.0;
constexpr int kMaxDepth = 40;

void check_grid(std::span<const double> omegas) {
  for (size_t i = 0; i < omegas.size(); ++i) {
    if (!(omegas[i] > 0.0)) throw std::domain_error("frequency grid must be positive");
    if (i > 0 && !(omegas[i] > omegas[i - 1])) throw std::domain_error("frequency grid must be strictly increasing");
  }
}

double wrapped_step(std::complex<double> from, std::complex<double> to) {
  if (from == 0.0 || to == 0.0) return 0.0;
  return std::arg(to / from);
}

// Appends refinement samples in (a, b]; on entry `out.back()` is a.
void refine(const TFExpr& expr, double max_domega, const PhaseSample& a, double omega_b,
            std::complex<double> value_b, int depth, std::vector<PhaseSample>& out) {
  const double step = wrapped_step(a.value, value_b);
  const bool too_wide = max_domega > 0.0 && (omega_b - a.omega) > max_domega;
  if (depth < kMaxDepth && (std::abs(step) > kMaxPhaseStep || too_wide)) {
    const double mid = std::sqrt(a.omega * omega_b);
    const auto vm = eval_exact(expr, mid);
    refine(expr, max_domega, a, mid, vm, depth + 1, out);
    const PhaseSample m = out.back();
    refine(expr, max_domega, m, omega_b, value_b, depth + 1, out);
    return;
  }
  out.push_back({omega_b, value_b, a.phase + step});
}

FrequencyResponse assemble(const TFExpr& expr, std::span<const double> omegas,
                           std::vector<std::complex<double>> values) {
  FrequencyResponse fr;
  fr.omega.assign(omegas.begin(), omegas.end());
  const auto track = phase_track(expr, omegas, values);
  fr.phase.reserve(omegas.size());
  size_t k = 0;
  for (const auto& s : track) {
    if (k < omegas.size() && s.omega == omegas[k]) {
      fr.phase.push_back(s.phase);
      ++k;
    }
  }
  fr.value = std::move(values);
  return fr;
}

}  // namespace

double FrequencyResponse::magnitude_db(size_t i) const { return 20.0 * std::log10(std::abs(value[i])); }
double FrequencyResponse::phase_deg(size_t i) const { return phase[i] * 180.0 / std::numbers::pi; }

std::vector<double> log_space(double lo, double hi, size_t n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2) throw std::domain_error("log_space: need 0 < lo < hi and n >= 2");
  std::vector<double> out(n);
  const double a = std::log10(lo), b = std::log10(hi);
  for (size_t i = 0; i < n; ++i) out[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<PhaseSample> phase_track(const TFExpr& expr, std::span<const double> omegas,
                                     std::span<const std::complex<double>> values) {
  std::vector<PhaseSample> out;
  if (omegas.empty()) return out;
  const double tau = total_delay(expr);
  const double max_domega = tau > 0.0 ? kMaxPhaseStep / tau : 0.0;
  out.reserve(omegas.size());
  out.push_back({omegas[0], values[0], values[0] == 0.0 ? 0.0 : std::arg(values[0])});
  for (size_t i = 1; i < omegas.size(); ++i) {
    const PhaseSample a = out.back();
    refine(expr, max_domega, a, omegas[i], values[i], 0, out);
  }
  return out;
}

double phase_near(const PhaseSample& anchor, std::complex<double> value) {
  return anchor.phase + wrapped_step(anchor.value, value);
}

FrequencyResponse freq_response(const TFExpr& expr, std::span<const double> omegas) {
  check_grid(omegas);
  const auto n = static_cast<std::ptrdiff_t>(omegas.size());
  std::vector<std::complex<double>> values(omegas.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      values[static_cast<size_t>(i)] = eval_exact(expr, omegas[static_cast<size_t>(i)]);
    } catch (...) {
#pragma omp critical(indi_freq_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return assemble(expr, omegas, std::move(values));
}

FrequencyResponse freq_response_serial(const TFExpr& expr, std::span<const double> omegas) {
  check_grid(omegas);
  std::vector<std::complex<double>> values;
  values.reserve(omegas.size());
  for (double w : omegas) values.push_back(eval_exact(expr, w));
  return assemble(expr, omegas, std::move(values));
}

}  // namespace indi
