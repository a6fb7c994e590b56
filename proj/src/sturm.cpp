#include "mskv/sturm.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "exact.hpp"

namespace mskv::sturm {
namespace {

using exact::Rational;

template <class T>
struct FieldOps;

template <>
struct FieldOps<double> {
  static double abs(double v) { return std::fabs(v); }
  // Zero out coefficients that are pure cancellation noise.
  static void clean(std::vector<double>& r, double reference) {
    const double cut = kRemainderCutoff * reference;
    for (double& c : r)
      if (std::fabs(c) <= cut) c = 0.0;
  }
  // Positive rescaling keeps signs; this keeps magnitudes near one.
  static void normalize(std::vector<double>& r) {
    double m = 0.0;
    for (double c : r) m = std::max(m, std::fabs(c));
    if (m > 0.0)
      for (double& c : r) c /= m;
  }
  static double max_abs(const std::vector<double>& r) {
    double m = 0.0;
    for (double c : r) m = std::max(m, std::fabs(c));
    return m;
  }
};

template <>
struct FieldOps<Rational> {
  static void clean(std::vector<Rational>&, int) {}
  static void normalize(std::vector<Rational>& r) {
    // Make the leading coefficient +-1 to limit growth of the numbers.
    if (r.empty()) return;
    const Rational lead = boost::multiprecision::abs(r.back());
    for (auto& c : r) c /= lead;
  }
  static int max_abs(const std::vector<Rational>&) { return 1; }
};

template <class T>
void trim(std::vector<T>& p) {
  while (!p.empty() && p.back() == T(0)) p.pop_back();
}

template <class T>
std::vector<T> remainder(std::vector<T> num, const std::vector<T>& den) {
  const auto ref = FieldOps<T>::max_abs(num);
  const std::size_t dn = den.size();
  while (num.size() >= dn && !num.empty()) {
    const T factor = num.back() / den.back();
    const std::size_t shift = num.size() - dn;
    for (std::size_t i = 0; i < dn; ++i) num[shift + i] -= factor * den[i];
    num.pop_back();
    trim(num);
  }
  FieldOps<T>::clean(num, ref);
  trim(num);
  return num;
}

template <class T>
std::vector<std::vector<T>> build_sequence(std::vector<T> p) {
  trim(p);
  std::vector<std::vector<T>> seq;
  if (p.empty()) return seq;
  FieldOps<T>::normalize(p);
  seq.push_back(p);
  std::vector<T> dp;
  for (std::size_t i = 1; i < p.size(); ++i) dp.push_back(p[i] * T(static_cast<long>(i)));
  trim(dp);
  if (dp.empty()) return seq;
  FieldOps<T>::normalize(dp);
  seq.push_back(dp);
  while (seq.back().size() > 1) {
    auto r = remainder(seq[seq.size() - 2], seq.back());
    if (r.empty()) break;
    for (auto& c : r) c = -c;
    FieldOps<T>::normalize(r);
    seq.push_back(std::move(r));
  }
  return seq;
}

template <class T>
int sign_of(const T& v) {
  return (v > T(0)) - (v < T(0));
}

// Sign at +inf (dir=+1) or -inf (dir=-1).
template <class T>
int sign_at_infinity(const std::vector<T>& p, int dir) {
  const int s = sign_of(p.back());
  const bool odd = (p.size() - 1) % 2 == 1;
  return (dir < 0 && odd) ? -s : s;
}

template <class T>
T horner(const std::vector<T>& p, const T& x) {
  T acc(0);
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
  return acc;
}

template <class T>
int sign_changes(const std::vector<std::vector<T>>& seq, double x) {
  int changes = 0;
  int last = 0;
  for (const auto& p : seq) {
    int s = 0;
    if (std::isinf(x)) {
      s = sign_at_infinity(p, x > 0 ? 1 : -1);
    } else if constexpr (std::is_same_v<T, double>) {
      s = sign_of(horner(p, x));
    } else {
      s = sign_of(horner(p, exact::to_rational(x)));
    }
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

template <class T>
int count_in(const std::vector<std::vector<T>>& seq, double lo, double hi) {
  if (seq.empty() || !(lo < hi)) return 0;
  return sign_changes(seq, lo) - sign_changes(seq, hi);
}

}  // namespace

int count_roots(const Polynomial& p, double lo, double hi) {
  std::vector<double> c(p.coeffs().begin(), p.coeffs().end());
  return count_in(build_sequence(std::move(c)), lo, hi);
}

int count_roots_exact(const Polynomial& p, double lo, double hi) {
  return count_in(build_sequence(exact::from_polynomial(p)), lo, hi);
}

int count_positive_roots_exact(const Polynomial& p) { return exact::count_positive_roots(exact::from_polynomial(p)); }

}  // namespace mskv::sturm

namespace mskv::exact {

int count_positive_roots(RPoly r) {
  // Strip the factor x^j so that zero is not a root, then count on (0, inf].
  trim(r);
  std::size_t j = 0;
  while (j < r.size() && r[j] == 0) ++j;
  r.erase(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(j));
  return sturm::count_in(sturm::build_sequence(std::move(r)), 0.0, sturm::kInf);
}

}  // namespace mskv::exact

namespace mskv::sturm {

Polynomial derivative_gcd(const Polynomial& p) {
  std::vector<double> c(p.coeffs().begin(), p.coeffs().end());
  auto seq = build_sequence(std::move(c));
  if (seq.size() < 2) return Polynomial::constant(1.0);
  return Polynomial(seq.back());
}

}  // namespace mskv::sturm
