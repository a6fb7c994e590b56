#pragma once

#include <limits>

#include "mskv/polynomial.hpp"

namespace mskv::sturm {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Remainders whose coefficients fall below this fraction of the dividend's
/// largest coefficient are treated as zero in the floating-point sequence.
inline constexpr double kRemainderCutoff = 1e-12;

/// Number of distinct real roots in (lo, hi] using a floating-point Sturm
/// sequence. lo and hi may be infinite.
int count_roots(const Polynomial& p, double lo = -kInf, double hi = kInf);

/// Same count with the sequence built over exact rationals. Every finite
/// double is a dyadic rational, so the answer is exact for the given
/// coefficients.
int count_roots_exact(const Polynomial& p, double lo = -kInf, double hi = kInf);

/// Distinct roots in (0, inf), exact. A root at zero is not counted.
int count_positive_roots_exact(const Polynomial& p);

/// gcd(p, p') up to a constant factor, from the floating-point sequence.
Polynomial derivative_gcd(const Polynomial& p);

}  // namespace mskv::sturm
