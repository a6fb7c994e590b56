#pragma once

#include <optional>
#include <vector>

#include "mskv/model.hpp"
#include "mskv/particles.hpp"
#include "mskv/selfconsist.hpp"

namespace mskv {

struct GridParams {
  double halfwidth = 6.0;
  int n = 2401;
};

/// Uniform grid x_i = x0 + i h with one density row per species.
struct DensityGrid {
  double x0 = 0.0;
  double h = 0.0;
  std::vector<std::vector<double>> values;

  int n() const { return values.empty() ? 0 : static_cast<int>(values[0].size()); }
  double x(int i) const { return x0 + i * h; }
};

/// Trapezoid rule on a grid row.
double trapezoid(const std::vector<double>& f, double h);

/// Normalized tilted Gibbs density of every species at magnetization m.
/// Widens the grid (same h) up to six times when the edge values are not
/// negligible, then fails with GridTooNarrow.
DensityGrid gibbs_density_grid(const ModelSpec& spec, const Magnetization& m, const GridParams& grid = {});

/// 1.06 std N^{-1/5}.
double kde_bandwidth(const std::vector<double>& x);

/// Gaussian-kernel estimate of each species on the grid. bandwidth <= 0
/// selects the reference rule per species.
DensityGrid density_from_particles(const ParticleEnsemble& ens, const GridParams& grid, double bandwidth = 0.0);

double free_energy(const ModelSpec& spec, const DensityGrid& rho);
double dissipation(const ModelSpec& spec, const DensityGrid& rho);

struct FreeEnergyBound {
  double value = 0.0;  // C + lambda_minus
  double C = 0.0;
  double lambda_minus = 0.0;
  double beta = 0.0;
  std::optional<double> lambda_plus;  // inf V_k, when every alpha_kl >= 0
};
FreeEnergyBound free_energy_lower_bound(const ModelSpec& spec);

/// Central differences inside, second-order one-sided at the ends.
std::vector<double> grid_derivative(const std::vector<double>& f, double h);

}  // namespace mskv
