#pragma once

// Exact rational polynomial arithmetic. Internal to the library.

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <vector>

#include "mskv/polynomial.hpp"

namespace mskv::exact {

using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

/// Ascending coefficients; trailing zeros trimmed.
using RPoly = std::vector<Rational>;

inline Rational to_rational(double x) {
  if (x == 0.0) return Rational(0);
  int e = 0;
  const double m = std::frexp(x, &e);
  const auto mant = static_cast<std::int64_t>(std::ldexp(m, 53));
  e -= 53;
  Rational r(mant);
  if (e > 0) {
    r *= Rational(Integer(1) << e);
  } else if (e < 0) {
    r /= Rational(Integer(1) << (-e));
  }
  return r;
}

inline void trim(RPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

inline RPoly from_polynomial(const Polynomial& p) {
  RPoly r;
  for (double c : p.coeffs()) r.push_back(to_rational(c));
  trim(r);
  return r;
}

inline Polynomial to_polynomial(const RPoly& p) {
  std::vector<double> c;
  c.reserve(p.size());
  for (const auto& v : p) c.push_back(static_cast<double>(v));
  return Polynomial(std::move(c));
}

inline RPoly add(const RPoly& a, const RPoly& b) {
  RPoly r(std::max(a.size(), b.size()));
  for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
  trim(r);
  return r;
}

inline RPoly mul(const RPoly& a, const RPoly& b) {
  if (a.empty() || b.empty()) return {};
  RPoly r(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  trim(r);
  return r;
}

inline RPoly scale(const RPoly& a, const Rational& s) {
  RPoly r(a);
  for (auto& c : r) c *= s;
  trim(r);
  return r;
}

inline RPoly derivative(const RPoly& a) {
  if (a.size() <= 1) return {};
  RPoly r(a.size() - 1);
  for (std::size_t i = 1; i < a.size(); ++i) r[i - 1] = a[i] * static_cast<long>(i);
  trim(r);
  return r;
}

inline Rational eval(const RPoly& a, const Rational& x) {
  Rational acc(0);
  for (auto it = a.rbegin(); it != a.rend(); ++it) acc = acc * x + *it;
  return acc;
}

/// Distinct real roots in (0, inf) by an exact Sturm sequence. Defined in
/// sturm.cpp.
int count_positive_roots(RPoly p);

}  // namespace mskv::exact
