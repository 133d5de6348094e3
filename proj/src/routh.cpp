#include "indi/routh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace indi {

RouthResult routh_stable(const Polynomial& p, double tolerance) {
  if (p.degree() < 1) throw std::domain_error("routh_stable: degree must be at least 1");
  const int n = p.degree();
  const double sign = p.leading() < 0.0 ? -1.0 : 1.0;

  const size_t width = static_cast<size_t>(n) / 2 + 1;
  std::vector<std::vector<double>> rows(static_cast<size_t>(n) + 1, std::vector<double>(width, 0.0));
  for (int k = n, j = 0; k >= 0; k -= 2, ++j) rows[0][static_cast<size_t>(j)] = sign * p[k];
  for (int k = n - 1, j = 0; k >= 0; k -= 2, ++j) rows[1][static_cast<size_t>(j)] = sign * p[k];

  RouthResult out;
  double scale = std::abs(rows[0][0]);
  auto fix_row = [&](size_t i) {
    auto& row = rows[i];
    const double row_scale = std::max(scale, 1e-300);
    const bool all_zero =
        std::all_of(row.begin(), row.end(), [&](double v) { return std::abs(v) <= 1e-14 * row_scale; });
    if (all_zero) {
      // Auxiliary polynomial from the previous row; use its derivative.
      const int power = n - static_cast<int>(i) + 1;
      const auto& prev = rows[i - 1];
      for (size_t j = 0; j < width; ++j) row[j] = prev[j] * static_cast<double>(power - 2 * static_cast<int>(j));
      out.boundary_suspect = true;
    }
    if (std::abs(row[0]) <= 1e-14 * row_scale) {
      row[0] = 1e-12 * row_scale;
      out.boundary_suspect = true;
    }
    scale = std::max(scale, std::abs(row[0]));
  };

  fix_row(1);
  for (size_t i = 2; i <= static_cast<size_t>(n); ++i) {
    const auto& a = rows[i - 2];
    const auto& b = rows[i - 1];
    for (size_t j = 0; j + 1 < width; ++j) rows[i][j] = (b[0] * a[j + 1] - a[0] * b[j + 1]) / b[0];
    fix_row(i);
  }

  out.first_column.reserve(static_cast<size_t>(n) + 1);
  for (const auto& row : rows) out.first_column.push_back(row[0]);
  out.stable = !out.boundary_suspect &&
               std::all_of(out.first_column.begin(), out.first_column.end(), [&](double v) { return v > tolerance; });
  return out;
}

}  // namespace indi
