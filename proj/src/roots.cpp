#include "indi/roots.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "indi/errors.hpp"

namespace indi {
namespace {

using cplx = std::complex<double>;

constexpr int kMaxSweeps = 200;
constexpr double kResidualBound = 1e-8;

// Newton correction p(z)/p'(z) for a monic-scaled coefficient vector. For
// |z| > 1 the reversed polynomial is used to keep Horner's scheme well scaled.
cplx newton_ratio(const std::vector<double>& a, cplx z) {
  const size_t n = a.size() - 1;
  if (std::abs(z) <= 1.0) {
    cplx p = a[n], dp = 0.0;
    for (size_t i = n; i-- > 0;) {
      dp = dp * z + p;
      p = p * z + a[i];
    }
    if (dp == 0.0) return p == 0.0 ? cplx(0.0) : cplx(1e-3 * (1.0 + std::abs(z)));
    return p / dp;
  }
  const cplx w = 1.0 / z;
  cplx q = a[0], dq = 0.0;
  for (size_t i = 1; i <= n; ++i) {
    dq = dq * w + q;
    q = q * w + a[i];
  }
  if (q == 0.0) return 0.0;
  const cplx denom = static_cast<double>(n) - w * dq / q;
  if (denom == 0.0) return 1e-3 * (1.0 + std::abs(z));
  return z / denom;
}

std::vector<cplx> aberth(const std::vector<double>& a) {
  const size_t n = a.size() - 1;
  // Initial guesses on a circle whose radius is the geometric mean of the
  // root moduli, rotated off the real axis to break conjugate symmetry.
  const double radius = std::pow(std::abs(a[0] / a[n]), 1.0 / static_cast<double>(n));
  std::vector<cplx> z(n);
  for (size_t k = 0; k < n; ++k) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n) + 0.4;
    z[k] = std::polar(radius, angle);
  }
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool converged = true;
    for (size_t k = 0; k < n; ++k) {
      const cplx ratio = newton_ratio(a, z[k]);
      if (ratio == 0.0) continue;
      cplx repulsion = 0.0;
      for (size_t j = 0; j < n; ++j)
        if (j != k) repulsion += 1.0 / (z[k] - z[j]);
      const cplx step = ratio / (1.0 - ratio * repulsion);
      z[k] -= step;
      if (std::abs(step) > 4e-16 * std::max(1.0, std::abs(z[k]))) converged = false;
    }
    if (converged) break;
  }
  return z;
}

// Simultaneous iteration resolves a multiple root only to ~sqrt(eps); the
// centroid of such a cluster is well conditioned.
void merge_clusters(const Polynomial& p, std::vector<cplx>& z) {
  const size_t n = z.size();
  std::vector<bool> used(n, false);
  for (size_t i = 0; i < n; ++i) {
    if (used[i]) continue;
    std::vector<size_t> members{i};
    for (size_t j = i + 1; j < n; ++j)
      if (!used[j] && std::abs(z[j] - z[i]) < 1e-5 * std::max(1.0, std::abs(z[i]))) members.push_back(j);
    if (members.size() < 2) continue;
    cplx centroid = 0.0;
    double worst = 0.0;
    for (size_t m : members) {
      centroid += z[m];
      worst = std::max(worst, root_residual(p, z[m]));
    }
    centroid /= static_cast<double>(members.size());
    if (root_residual(p, centroid) <= worst) {
      for (size_t m : members) {
        z[m] = centroid;
        used[m] = true;
      }
    }
  }
}

}  // namespace

double root_residual(const Polynomial& p, std::complex<double> r) {
  const double scale = p.max_abs_coefficient() * std::pow(std::max(1.0, std::abs(r)), p.degree());
  return std::abs(p(r)) / scale;
}

std::vector<std::complex<double>> poly_roots(const Polynomial& p) {
  if (p.is_zero()) throw std::domain_error("poly_roots: zero polynomial");
  if (p.degree() < 1) throw std::domain_error("poly_roots: degree must be at least 1");

  std::vector<double> a(p.coefficients().begin(), p.coefficients().end());
  std::vector<cplx> roots;
  // Exact roots at the origin.
  size_t shift = 0;
  while (a[shift] == 0.0) ++shift;
  roots.assign(shift, 0.0);
  a.erase(a.begin(), a.begin() + static_cast<long>(shift));
  const double lead = a.back();
  for (double& c : a) c /= lead;

  const size_t n = a.size() - 1;
  if (n == 1) {
    roots.emplace_back(-a[0]);
  } else if (n == 2) {
    const double b = a[1], c = a[0];
    const double disc = b * b - 4.0 * c;
    if (disc >= 0.0) {
      const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
      const double r1 = q;
      const double r2 = (q != 0.0) ? c / q : 0.0;
      roots.emplace_back(r1);
      roots.emplace_back(r2);
    } else {
      const double im = 0.5 * std::sqrt(-disc);
      roots.emplace_back(-0.5 * b, im);
      roots.emplace_back(-0.5 * b, -im);
    }
  } else if (n > 2) {
    auto z = aberth(a);
    roots.insert(roots.end(), z.begin(), z.end());
  }
  merge_clusters(p, roots);

  for (const auto& r : roots) {
    if (!std::isfinite(r.real()) || !std::isfinite(r.imag()) || root_residual(p, r) >= kResidualBound)
      throw RootFindingError("poly_roots: residual bound not met (degree " + std::to_string(p.degree()) + ")");
  }
  return roots;
}

double max_real_part(const Polynomial& p) {
  const auto roots = poly_roots(p);
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& r : roots) m = std::max(m, r.real());
  return m;
}

}  // namespace indi
