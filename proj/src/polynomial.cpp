#include "mskv/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "mskv/error.hpp"
#include "mskv/sturm.hpp"

namespace mskv {

Polynomial::Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

Polynomial::Polynomial(std::initializer_list<double> coeffs) : coeffs_(coeffs) { trim(); }

Polynomial Polynomial::constant(double c) { return Polynomial(std::vector<double>{c}); }

Polynomial Polynomial::monomial(double c, int power) {
  std::vector<double> v(static_cast<std::size_t>(power) + 1, 0.0);
  v.back() = c;
  return Polynomial(std::move(v));
}

void Polynomial::trim() {
  while (!coeffs_.empty() && coeffs_.back() == 0.0) coeffs_.pop_back();
}

double Polynomial::coeff(int i) const noexcept {
  if (i < 0 || i >= static_cast<int>(coeffs_.size())) return 0.0;
  return coeffs_[static_cast<std::size_t>(i)];
}

double Polynomial::operator()(double x) const noexcept {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

Polynomial Polynomial::derivative(int order) const {
  Polynomial p = *this;
  for (int o = 0; o < order; ++o) {
    if (p.coeffs_.size() <= 1) return Polynomial();
    std::vector<double> d(p.coeffs_.size() - 1);
    for (std::size_t i = 1; i < p.coeffs_.size(); ++i) d[i - 1] = p.coeffs_[i] * static_cast<double>(i);
    p = Polynomial(std::move(d));
  }
  return p;
}

Polynomial Polynomial::compose(const Polynomial& inner) const {
  Polynomial acc;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * inner + constant(*it);
  return acc;
}

bool Polynomial::is_even() const noexcept {
  for (std::size_t i = 1; i < coeffs_.size(); i += 2)
    if (coeffs_[i] != 0.0) return false;
  return true;
}

double Polynomial::max_abs_coeff() const noexcept {
  double m = 0.0;
  for (double c : coeffs_) m = std::max(m, std::fabs(c));
  return m;
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  std::vector<double> r(std::max(a.coeffs_.size(), b.coeffs_.size()), 0.0);
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) r[i] += a.coeffs_[i];
  for (std::size_t i = 0; i < b.coeffs_.size(); ++i) r[i] += b.coeffs_[i];
  return Polynomial(std::move(r));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-1.0) * b; }

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero() || b.is_zero()) return Polynomial();
  std::vector<double> r(a.coeffs_.size() + b.coeffs_.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j) r[i + j] += a.coeffs_[i] * b.coeffs_[j];
  return Polynomial(std::move(r));
}

Polynomial operator*(double s, const Polynomial& p) {
  std::vector<double> r(p.coeffs_);
  for (double& c : r) c *= s;
  return Polynomial(std::move(r));
}

Polynomial::DivMod Polynomial::divmod(const Polynomial& divisor) const {
  if (divisor.is_zero()) throw numerical_error("model", "DivisionByZero", "polynomial division by zero");
  std::vector<double> num = coeffs_;
  const auto& den = divisor.coeffs_;
  if (num.size() < den.size()) return {Polynomial(), *this};
  std::vector<double> quot(num.size() - den.size() + 1, 0.0);
  for (std::size_t k = quot.size(); k-- > 0;) {
    const double f = num[k + den.size() - 1] / den.back();
    quot[k] = f;
    for (std::size_t i = 0; i < den.size(); ++i) num[k + i] -= f * den[i];
  }
  num.resize(den.size() - 1);
  return {Polynomial(std::move(quot)), Polynomial(std::move(num))};
}

namespace {

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

// Root of a square-free polynomial known to have exactly one distinct root
// of p in (lo, hi].
double refine_root(const Polynomial& p, const Polynomial& squarefree, double lo, double hi) {
  int slo = sign_of(squarefree(lo));
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const int shi = sign_of(squarefree(hi));
    if (shi == 0) return hi;
    if (slo != 0 && slo != shi) {
      const int sm = sign_of(squarefree(mid));
      if (sm == 0) return mid;
      if (sm == slo) {
        lo = mid;
      } else {
        hi = mid;
      }
    } else {
      // Signs unreliable (ill-conditioned); fall back to Sturm counts.
      if (sturm::count_roots(p, lo, mid) >= 1) {
        hi = mid;
      } else {
        lo = mid;
        slo = sign_of(squarefree(lo));
      }
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::vector<double> Polynomial::real_roots() const {
  std::vector<double> roots;
  if (degree() <= 0) return roots;
  if (degree() == 1) return {-coeffs_[0] / coeffs_[1]};

  Polynomial squarefree = *this;
  const Polynomial g = sturm::derivative_gcd(*this);
  if (g.degree() > 0) squarefree = divmod(g).quotient;

  double bound = 0.0;
  for (std::size_t i = 0; i + 1 < coeffs_.size(); ++i) bound = std::max(bound, std::fabs(coeffs_[i] / leading()));
  bound += 1.0;

  struct Interval {
    double lo, hi;
  };
  std::vector<Interval> stack{{-bound, bound}};
  while (!stack.empty()) {
    const auto [lo, hi] = stack.back();
    stack.pop_back();
    const int n = sturm::count_roots(*this, lo, hi);
    if (n <= 0) continue;
    if (n == 1) {
      roots.push_back(refine_root(*this, squarefree, lo, hi));
      continue;
    }
    double mid = 0.5 * (lo + hi);
    if (hi - lo <= 1e-14 * (1.0 + std::fabs(mid))) {
      // Numerically coincident cluster.
      roots.push_back(mid);
      continue;
    }
    if ((*this)(mid) == 0.0) {
      roots.push_back(mid);
      const double eps = 1e-9 * (hi - lo);
      stack.push_back({mid + eps, hi});
      stack.push_back({lo, mid - eps});
      continue;
    }
    stack.push_back({mid, hi});
    stack.push_back({lo, mid});
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

Polynomial::Minimum Polynomial::global_minimum() const {
  if (degree() == 0) return {0.0, coeff(0)};
  if (degree() % 2 != 0 || leading() <= 0.0)
    throw numerical_error("model", "Unbounded", "polynomial is not bounded below");
  Minimum best{0.0, std::numeric_limits<double>::infinity()};
  for (double x : derivative().real_roots()) {
    const double v = (*this)(x);
    if (v < best.value) best = {x, v};
  }
  return best;
}

}  // namespace mskv
