#pragma once

#include <initializer_list>
#include <span>
#include <vector>

namespace mskv {

/// Real polynomial stored with ascending-degree coefficients.
/// Trailing zero coefficients are trimmed, so the leading coefficient is
/// nonzero unless the polynomial is identically zero.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coeffs);
  Polynomial(std::initializer_list<double> coeffs);

  static Polynomial constant(double c);
  static Polynomial monomial(double c, int power);

  bool is_zero() const noexcept { return coeffs_.empty(); }
  /// Degree; the zero polynomial reports 0.
  int degree() const noexcept { return coeffs_.empty() ? 0 : static_cast<int>(coeffs_.size()) - 1; }
  double coeff(int i) const noexcept;
  double leading() const noexcept { return coeffs_.empty() ? 0.0 : coeffs_.back(); }
  std::span<const double> coeffs() const noexcept { return coeffs_; }

  /// Horner evaluation.
  double operator()(double x) const noexcept;

  Polynomial derivative(int order = 1) const;
  /// this(inner(x)).
  Polynomial compose(const Polynomial& inner) const;

  /// All odd-degree coefficients are exactly zero.
  bool is_even() const noexcept;
  /// Largest absolute coefficient (0 for the zero polynomial).
  double max_abs_coeff() const noexcept;

  /// Distinct real roots in ascending order, located by Sturm isolation
  /// followed by bisection on the square-free part.
  std::vector<double> real_roots() const;

  /// Global minimum over the real line. Requires even degree >= 2 and a
  /// positive leading coefficient, or degree 0.
  struct Minimum {
    double x;
    double value;
  };
  Minimum global_minimum() const;

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(double s, const Polynomial& p);
  friend Polynomial operator*(const Polynomial& p, double s) { return s * p; }
  friend bool operator==(const Polynomial& a, const Polynomial& b) = default;

  /// Quotient and remainder of polynomial long division.
  struct DivMod;
  DivMod divmod(const Polynomial& divisor) const;

 private:
  void trim();
  std::vector<double> coeffs_;
};

struct Polynomial::DivMod {
  Polynomial quotient;
  Polynomial remainder;
};

}  // namespace mskv
