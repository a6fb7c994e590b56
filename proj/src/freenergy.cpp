#include "mskv/freenergy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mskv/error.hpp"

namespace mskv {

double trapezoid(const std::vector<double>& f, double h) {
  if (f.size() < 2) return 0.0;
  double s = 0.5 * (f.front() + f.back());
  for (std::size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
  return s * h;
}

std::vector<double> grid_derivative(const std::vector<double>& f, double h) {
  const std::size_t n = f.size();
  std::vector<double> d(n, 0.0);
  if (n < 3) return d;
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
  d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
  d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
  return d;
}

namespace {

void check_grid(const GridParams& g) {
  if (!(g.halfwidth > 0.0) || g.n < 3) throw validation_error("freenergy", "BadGrid", "need halfwidth > 0 and n >= 3");
}

void require_1d(const ModelSpec& spec) {
  check_dimensions(spec);
  if (spec.d != 1) throw validation_error("freenergy", "DimensionUnsupported", "requires d = 1");
}

}  // namespace

DensityGrid gibbs_density_grid(const ModelSpec& spec, const Magnetization& m, const GridParams& grid) {
  require_1d(spec);
  check_grid(grid);
  if (m.size() != spec.M) throw validation_error("freenergy", "BadDimensions", "magnetization length must be M");
  GridParams g = grid;
  const double h = 2.0 * g.halfwidth / (g.n - 1);
  for (int attempt = 0; attempt <= 6; ++attempt) {
    DensityGrid out;
    out.x0 = -g.halfwidth;
    out.h = h;
    bool narrow = false;
    for (int k = 0; k < spec.M; ++k) {
      double A = 0.0;
      for (int l = 0; l < spec.M; ++l) A += spec.a[static_cast<std::size_t>(l)] * spec.alpha(k, l) * m(l);
      const Polynomial U = effective_potential(spec, k);
      const double s = spec.sigma[static_cast<std::size_t>(k)];
      const double beta = 2.0 / (s * s);
      std::vector<double> e(static_cast<std::size_t>(g.n));
      for (int i = 0; i < g.n; ++i) {
        const double x = out.x(i);
        e[static_cast<std::size_t>(i)] = -beta * (U(x) - A * x);
      }
      const double emax = *std::max_element(e.begin(), e.end());
      for (auto& v : e) v = std::exp(v - emax);
      const double mass = trapezoid(e, h);
      for (auto& v : e) v /= mass;
      const double vmax = *std::max_element(e.begin(), e.end());
      if (e.front() > 1e-12 * vmax || e.back() > 1e-12 * vmax) narrow = true;
      out.values.push_back(std::move(e));
    }
    if (!narrow) return out;
    g.halfwidth *= 2.0;
    g.n = 2 * g.n - 1;
  }
  throw numerical_error("freenergy", "GridTooNarrow", "density not negligible at the grid edge");
}

double kde_bandwidth(const std::vector<double>& x) {
  if (x.empty()) throw validation_error("freenergy", "EmptySpecies", "no samples");
  const double n = static_cast<double>(x.size());
  const double mean = pairwise_sum(x.data(), x.size(), 1) / n;
  std::vector<double> sq(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) sq[i] = (x[i] - mean) * (x[i] - mean);
  const double var = x.size() > 1 ? pairwise_sum(sq.data(), sq.size(), 1) / (n - 1.0) : 0.0;
  return 1.06 * std::sqrt(var) * std::pow(n, -0.2);
}

DensityGrid density_from_particles(const ParticleEnsemble& ens, const GridParams& grid, double bandwidth) {
  check_grid(grid);
  if (ens.d != 1) throw validation_error("freenergy", "DimensionUnsupported", "requires d = 1");
  DensityGrid out;
  out.x0 = -grid.halfwidth;
  out.h = 2.0 * grid.halfwidth / (grid.n - 1);
  const int n = grid.n;
  for (const auto& raw : ens.positions) {
    if (raw.empty()) throw validation_error("freenergy", "EmptySpecies", "species has no particles");
    std::vector<double> pts = raw;
    std::sort(pts.begin(), pts.end());
    double bw = bandwidth > 0.0 ? bandwidth : kde_bandwidth(pts);
    if (!(bw > 0.0)) bw = 2.0 * out.h;

    // Linear binning onto the nodes, then a truncated Gaussian convolution.
    std::vector<double> bins(static_cast<std::size_t>(n), 0.0);
    for (double p : pts) {
      const double u = (p - out.x0) / out.h;
      if (u < 0.0 || u > n - 1) continue;
      const int i = std::min(static_cast<int>(std::floor(u)), n - 2);
      const double frac = u - i;
      bins[static_cast<std::size_t>(i)] += 1.0 - frac;
      bins[static_cast<std::size_t>(i) + 1] += frac;
    }
    const int reach = static_cast<int>(std::ceil(6.0 * bw / out.h));
    std::vector<double> kern(static_cast<std::size_t>(reach) + 1);
    for (int j = 0; j <= reach; ++j) {
      const double t = j * out.h / bw;
      kern[static_cast<std::size_t>(j)] = std::exp(-0.5 * t * t);
    }
    std::vector<double> dens(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      const int lo = std::max(0, i - reach), hi = std::min(n - 1, i + reach);
      for (int j = lo; j <= hi; ++j) s += bins[static_cast<std::size_t>(j)] * kern[static_cast<std::size_t>(std::abs(j - i))];
      dens[static_cast<std::size_t>(i)] = s;
    }
    const double mass = trapezoid(dens, out.h);
    if (!(mass > 0.0)) throw numerical_error("freenergy", "GridTooNarrow", "no particle mass on the grid");
    for (auto& v : dens) v /= mass;
    out.values.push_back(std::move(dens));
  }
  return out;
}

namespace {

struct Moments {
  double m1, m2;
};

Moments grid_moments(const DensityGrid& rho, std::size_t k) {
  const auto& r = rho.values[k];
  std::vector<double> f1(r.size()), f2(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double x = rho.x(static_cast<int>(i));
    f1[i] = x * r[i];
    f2[i] = x * x * r[i];
  }
  return {trapezoid(f1, rho.h), trapezoid(f2, rho.h)};
}

void check_density(const ModelSpec& spec, const DensityGrid& rho) {
  require_1d(spec);
  if (static_cast<int>(rho.values.size()) != spec.M) throw validation_error("freenergy", "BadDimensions", "need M rows");
}

}  // namespace

double free_energy(const ModelSpec& spec, const DensityGrid& rho) {
  check_density(spec, rho);
  const auto M = static_cast<std::size_t>(spec.M);
  std::vector<Moments> mom;
  double total = 0.0;
  for (std::size_t k = 0; k < M; ++k) {
    const auto& r = rho.values[k];
    std::vector<double> ent(r.size()), pot(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
      ent[i] = r[i] > 0.0 ? r[i] * std::log(r[i]) : 0.0;
      pot[i] = spec.V[k](rho.x(static_cast<int>(i))) * r[i];
    }
    const double s = spec.sigma[k];
    total += spec.a[k] * (0.5 * s * s * trapezoid(ent, rho.h) + trapezoid(pot, rho.h));
    mom.push_back(grid_moments(rho, k));
  }
  // (alpha/2) iint (x-y)^2 rho_k rho_l = (alpha/2)(M2_k + M2_l - 2 M1_k M1_l)
  for (std::size_t k = 0; k < M; ++k)
    for (std::size_t l = 0; l < M; ++l)
      total += 0.5 * spec.a[k] * spec.a[l] * 0.5 * spec.alpha(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) *
               (mom[k].m2 + mom[l].m2 - 2.0 * mom[k].m1 * mom[l].m1);
  return total;
}

double dissipation(const ModelSpec& spec, const DensityGrid& rho) {
  check_density(spec, rho);
  const auto M = static_cast<std::size_t>(spec.M);
  std::vector<Moments> mom;
  for (std::size_t k = 0; k < M; ++k) mom.push_back(grid_moments(rho, k));
  double total = 0.0;
  for (std::size_t k = 0; k < M; ++k) {
    const auto& r = rho.values[k];
    const auto dr = grid_derivative(r, rho.h);
    const Polynomial dV = spec.V[k].derivative();
    const double s = spec.sigma[k];
    std::vector<double> f(r.size(), 0.0);
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (!(r[i] > 0.0)) continue;
      const double x = rho.x(static_cast<int>(i));
      double b = dV(x);
      for (std::size_t l = 0; l < M; ++l)
        b += spec.a[l] * spec.alpha(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) * (x - mom[l].m1);
      const double J = 0.5 * s * s * dr[i] + b * r[i];
      f[i] = J * J / r[i];
    }
    total += spec.a[k] * trapezoid(f, rho.h);
  }
  return total;
}

FreeEnergyBound free_energy_lower_bound(const ModelSpec& spec) {
  validate(spec);
  FreeEnergyBound b;
  b.beta = spec.alpha.minCoeff();
  double smax = 0.0;
  for (double s : spec.sigma) smax = std::max(smax, s);
  b.C = -8.0 / std::numbers::e - 0.5 * smax * smax;
  b.lambda_minus = std::numeric_limits<double>::infinity();
  for (int k = 0; k < spec.M; ++k) {
    const double s = spec.sigma[static_cast<std::size_t>(k)];
    const Polynomial W = spec.V[static_cast<std::size_t>(k)] + Polynomial::monomial(0.5 * (b.beta - s * s), 2);
    if (W.degree() > 0 && (W.degree() % 2 != 0 || W.leading() <= 0.0))
      throw numerical_error("freenergy", "Unbounded", "V_k + (beta - sigma_k^2)/2 x^2 is not bounded below");
    b.lambda_minus = std::min(b.lambda_minus, W.global_minimum().value);
  }
  b.value = b.C + b.lambda_minus;
  if (b.beta >= 0.0) {
    double lp = std::numeric_limits<double>::infinity();
    for (const auto& V : spec.V) lp = std::min(lp, V.global_minimum().value);
    b.lambda_plus = lp;
  }
  return b;
}

}  // namespace mskv
