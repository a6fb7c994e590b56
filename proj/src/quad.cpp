#include "mskv/quad.hpp"

#include <boost/math/special_functions/legendre.hpp>

#include <algorithm>
#include <cmath>
#include <string>

#include "mskv/error.hpp"

namespace mskv {

namespace {

constexpr double kRelTol = 1e-12;
constexpr int kStartPanels = 16;
constexpr int kPanelBudget = 4096;

void check_integrable(const Polynomial& U, double sigma) {
  if (U.degree() < 2 || U.degree() % 2 != 0 || U.leading() <= 0.0)
    throw validation_error("quad", "NotIntegrable", "U needs even degree >= 2 and positive leading coefficient");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw validation_error("quad", "NonPositiveSigma", "sigma must be > 0");
}

}  // namespace

const GaussRule& gauss_legendre_32() {
  static const GaussRule rule = [] {
    GaussRule r;
    const unsigned n = 32;
    // legendre_p_zeros returns the nonnegative zeros in ascending order.
    const auto zeros = boost::math::legendre_p_zeros<double>(static_cast<int>(n));
    for (auto it = zeros.rbegin(); it != zeros.rend(); ++it) {
      const double x = -*it;
      const double dp = boost::math::legendre_p_prime<double>(static_cast<int>(n), x);
      r.x.push_back(x);
      r.w.push_back(2.0 / ((1.0 - x * x) * dp * dp));
    }
    for (double z : zeros) {
      const double dp = boost::math::legendre_p_prime<double>(static_cast<int>(n), z);
      r.x.push_back(z);
      r.w.push_back(2.0 / ((1.0 - z * z) * dp * dp));
    }
    return r;
  }();
  return rule;
}

double truncation_halfwidth(const Polynomial& U, double sigma, double tilt, double eps) {
  check_integrable(U, sigma);
  if (!(eps > 0.0 && eps <= 1e-3)) throw validation_error("quad", "BadEps", "eps must lie in (0, 1e-3]");
  const double beta = 2.0 / (sigma * sigma);
  const Polynomial W = U - Polynomial::monomial(tilt, 1);
  const double wmin = W.global_minimum().value;
  double reach = 0.0;
  for (double x : W.derivative().real_roots()) reach = std::max(reach, std::fabs(x));
  const double target = -std::log(eps);
  for (double L = 1.0; L <= 1e6; L *= 2.0) {
    if (L <= reach) continue;
    if (beta * (W(L) - wmin) > target && beta * (W(-L) - wmin) > target) return L;
  }
  throw numerical_error("quad", "NoConvergence", "truncation half-width exceeds 1e6");
}

GibbsDensity1D make_gibbs(const Polynomial& U, double sigma, double tilt, double eps) {
  return GibbsDensity1D{U, sigma, tilt, truncation_halfwidth(U, sigma, tilt, eps)};
}

double GibbsMoments::raw(int ell) const {
  return scaled.at(static_cast<std::size_t>(ell)) * std::exp(log_scale);
}

GibbsMoments gibbs_moments(const GibbsDensity1D& g, int max_ell) {
  check_integrable(g.U, g.sigma);
  if (max_ell < 0 || max_ell > kMaxMoment)
    throw validation_error("quad", "MomentOrder", "moment order must be in [0, 16]");
  const double L = g.domain_halfwidth > 0.0 ? g.domain_halfwidth : truncation_halfwidth(g.U, g.sigma, g.tilt);
  const double beta = 2.0 / (g.sigma * g.sigma);
  const Polynomial W = g.U - Polynomial::monomial(g.tilt, 1);
  const double wmin = W.global_minimum().value;
  const auto& rule = gauss_legendre_32();
  const auto nm = static_cast<std::size_t>(max_ell) + 1;

  std::vector<double> sum(nm), abs_sum(nm);
  auto integrate = [&](int panels) {
    std::fill(sum.begin(), sum.end(), 0.0);
    std::fill(abs_sum.begin(), abs_sum.end(), 0.0);
    const double h = 2.0 * L / panels;
    for (int p = 0; p < panels; ++p) {
      const double c = -L + (p + 0.5) * h;
      for (std::size_t i = 0; i < rule.x.size(); ++i) {
        const double x = c + 0.5 * h * rule.x[i];
        double f = 0.5 * h * rule.w[i] * std::exp(-beta * (W(x) - wmin));
        const double ax = std::fabs(x);
        double fa = f;
        for (std::size_t l = 0; l < nm; ++l) {
          sum[l] += f;
          abs_sum[l] += fa;
          f *= x;
          fa *= ax;
        }
      }
    }
  };

  int panels = kStartPanels;
  integrate(panels);
  std::vector<double> prev = sum;
  while (true) {
    panels *= 2;
    if (panels > kPanelBudget)
      throw numerical_error("quad", "QuadratureFailure", "panel budget exceeded (sigma=" + std::to_string(g.sigma) + ")");
    integrate(panels);
    bool ok = true;
    for (std::size_t l = 0; l < nm && ok; ++l)
      if (std::fabs(sum[l] - prev[l]) > kRelTol * abs_sum[l]) ok = false;
    if (ok) break;
    prev = sum;
  }
  if (!(sum[0] > 0.0)) throw numerical_error("quad", "QuadratureFailure", "nonpositive normalization");
  return GibbsMoments{sum, -beta * wmin, panels};
}

double gibbs_moment(const GibbsDensity1D& g, int ell) { return gibbs_moments(g, ell).raw(ell); }

double gibbs_mean(const GibbsDensity1D& g) { return gibbs_moments(g, 1).mean(); }

double gibbs_variance_at_zero_tilt(const Polynomial& U, double sigma) {
  return gibbs_moments(make_gibbs(U, sigma, 0.0), 2).normalized(2);
}

}  // namespace mskv
