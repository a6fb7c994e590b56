#pragma once

#include <vector>

#include "mskv/polynomial.hpp"

namespace mskv {

/// Weight w(x) = exp[-(2/sigma^2)(U(x) - tilt x)] on [-L, L].
struct GibbsDensity1D {
  Polynomial U;
  double sigma = 1.0;
  double tilt = 0.0;
  double domain_halfwidth = 0.0;
};

inline constexpr double kDefaultTruncationEps = 1e-14;
inline constexpr int kMaxMoment = 16;

/// Builds a density with the truncation half-width filled in.
GibbsDensity1D make_gibbs(const Polynomial& U, double sigma, double tilt, double eps = kDefaultTruncationEps);

/// Smallest L in the doubling sequence 1, 2, 4, ... beyond every critical
/// point of U(x) -+ tilt x at which the weight has dropped below eps times
/// its maximum.
double truncation_halfwidth(const Polynomial& U, double sigma, double tilt, double eps = kDefaultTruncationEps);

/// Raw moments  I_l = int x^l w(x) dx, l = 0..max_ell, from one adaptive
/// pass. Values are held as scaled * exp(log_scale) so that nothing
/// overflows; raw() multiplies the scale back in.
struct GibbsMoments {
  std::vector<double> scaled;
  double log_scale = 0.0;
  int panels = 0;

  double raw(int ell) const;
  /// I_ell / I_0.
  double normalized(int ell) const { return scaled.at(static_cast<std::size_t>(ell)) / scaled.at(0); }
  double mean() const { return normalized(1); }
  double variance() const {
    const double m = mean();
    return normalized(2) - m * m;
  }
};

GibbsMoments gibbs_moments(const GibbsDensity1D& g, int max_ell);

double gibbs_moment(const GibbsDensity1D& g, int ell);
double gibbs_mean(const GibbsDensity1D& g);
double gibbs_variance_at_zero_tilt(const Polynomial& U, double sigma);

/// Nodes and weights of the 32-point Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};
const GaussRule& gauss_legendre_32();

}  // namespace mskv
