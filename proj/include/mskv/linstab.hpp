#pragma once

#include <vector>

#include "mskv/freenergy.hpp"
#include "mskv/model.hpp"

namespace mskv {

/// Linearization around the zero-magnetization stationary density of the
/// structural reduction: theta = abar_1, V_theta = Vbar + theta x^2 / 2,
/// inverse temperature 2 / sigma^2.
struct LinOpContext {
  ModelSpec spec;
  DensityGrid base;  // one row: rho_inf
  double sigma = 0.0;
  double theta = 0.0;
  Polynomial V_theta;
};

/// sigma rescales the model as with_sigma_scale does.
LinOpContext make_linop_context(const ModelSpec& spec, double sigma, const GridParams& grid = {6.0, 4801});

/// (sigma^2/2) f'' + (V_theta' f)' - theta (int y f) rho_inf'.
std::vector<double> apply_linearized(const LinOpContext& ctx, const std::vector<double>& f);

struct NullResiduals {
  double r0 = 0.0;  // |L rho| / |rho|
  double r1 = 0.0;  // |L x rho| / |x rho|
};
NullResiduals null_space_residuals(const ModelSpec& spec, double sigma, const GridParams& grid = {6.0, 4801});

/// Discrete L2 norm sqrt(h sum f^2).
double grid_l2(const std::vector<double>& f, double h);

}  // namespace mskv
