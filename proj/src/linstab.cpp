#include "mskv/linstab.hpp"

#include <cmath>

#include "mskv/error.hpp"
#include "mskv/selfconsist.hpp"

namespace mskv {

double grid_l2(const std::vector<double>& f, double h) {
  double s = 0.0;
  for (double v : f) s += v * v;
  return std::sqrt(h * s);
}

LinOpContext make_linop_context(const ModelSpec& spec, double sigma, const GridParams& grid) {
  if (!(sigma > 0.0)) throw validation_error("linstab", "NonPositiveSigma", "sigma must be positive");
  const ModelSpec scaled = with_sigma_scale(spec, sigma);
  const AssumptionReport rep = validate(scaled);
  if (!rep.structural || !rep.structure)
    throw validation_error("linstab", "StructuralRequired", "linearized operator needs the structural assumption");
  LinOpContext ctx;
  ctx.spec = scaled;
  ctx.sigma = rep.structure->sigma;
  ctx.theta = alpha_bar(scaled, 0);
  ctx.V_theta = rep.structure->Vbar + Polynomial::monomial(0.5 * ctx.theta, 2);

  ModelSpec single;
  single.M = 1;
  single.d = 1;
  single.a = {1.0};
  single.sigma = {ctx.sigma};
  single.V = {ctx.V_theta};
  single.alpha = Eigen::MatrixXd::Zero(1, 1);
  ctx.base = gibbs_density_grid(single, Magnetization::Zero(1), grid);
  return ctx;
}

namespace {

std::vector<double> second_derivative(const std::vector<double>& f, double h) {
  const std::size_t n = f.size();
  std::vector<double> d(n, 0.0);
  if (n < 4) return d;
  const double h2 = h * h;
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / h2;
  d[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2;
  d[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / h2;
  return d;
}

}  // namespace

std::vector<double> apply_linearized(const LinOpContext& ctx, const std::vector<double>& f) {
  const auto& rho = ctx.base.values.at(0);
  if (f.size() != rho.size()) throw validation_error("linstab", "BadDimensions", "f must live on the base grid");
  const double h = ctx.base.h;
  const Polynomial dV = ctx.V_theta.derivative();
  std::vector<double> g(f.size()), yf(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double x = ctx.base.x(static_cast<int>(i));
    g[i] = dV(x) * f[i];
    yf[i] = x * f[i];
  }
  const double first = trapezoid(yf, h);
  const auto f2 = second_derivative(f, h);
  const auto g1 = grid_derivative(g, h);
  const auto r1 = grid_derivative(rho, h);
  const double D = 0.5 * ctx.sigma * ctx.sigma;
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = D * f2[i] + g1[i] - ctx.theta * first * r1[i];
  return out;
}

NullResiduals null_space_residuals(const ModelSpec& spec, double sigma, const GridParams& grid) {
  const LinOpContext ctx = make_linop_context(spec, sigma, grid);
  const auto& rho = ctx.base.values[0];
  std::vector<double> xr(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) xr[i] = ctx.base.x(static_cast<int>(i)) * rho[i];
  const double h = ctx.base.h;
  return {grid_l2(apply_linearized(ctx, rho), h) / grid_l2(rho, h),
          grid_l2(apply_linearized(ctx, xr), h) / grid_l2(xr, h)};
}

}  // namespace mskv
