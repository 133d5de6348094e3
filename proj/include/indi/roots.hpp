#pragma once

#include <complex>
#include <vector>

#include "indi/polynomial.hpp"

namespace indi {

/// All complex roots of p (degree >= 1) by simultaneous Aberth–Ehrlich
/// iteration (200 sweeps at most). Every returned root r satisfies
///   |p(r)| / (max|a_i| * max(1,|r|)^deg) < 1e-8,
/// otherwise RootFindingError is thrown. Zero polynomial or degree 0 ->
/// std::domain_error.
std::vector<std::complex<double>> poly_roots(const Polynomial& p);

/// Normalized residual used by the acceptance bound above.
double root_residual(const Polynomial& p, std::complex<double> r);

/// Largest real part among the roots of p.
double max_real_part(const Polynomial& p);

}  // namespace indi
