#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "mskv/model.hpp"

namespace mskv {

using Magnetization = Eigen::VectorXd;

struct SolveOptions {
  /// Extra seeds; the default grid is appended unless use_default_seeds is off.
  std::vector<Magnetization> seeds;
  bool use_default_seeds = true;
  double damping = 1.0;
  double tol = 1e-10;
  int max_iter = 10000;
  double dedupe_tol = 1e-6;
  std::uint64_t rng_seed = 12345;
};

struct StationarySet {
  std::vector<Magnetization> solutions;
  std::vector<double> residuals;
  double converged_fraction = 0.0;
};

/// Phi(m) together with the tilted variances, which give its Jacobian:
/// d phi_k / d m_l = (2/sigma_k^2) Var_k a_l alpha_kl.
struct PhiEval {
  Magnetization value;
  Eigen::VectorXd variance;
};

PhiEval phi_eval(const ModelSpec& spec, const Magnetization& m);
Magnetization phi_map(const ModelSpec& spec, const Magnetization& m);

/// Zero, every sign pattern of the candidate magnitudes, then uniform
/// random seeds in [-3, 3]^M.
std::vector<Magnetization> default_seeds(const ModelSpec& spec, std::uint64_t rng_seed, int n_random = 8);

StationarySet solve_selfconsistency(const ModelSpec& spec, const SolveOptions& opts = {});

/// psi(A) = int (x - A / abar) exp(-(2/sigma^2)(V0(x) - A x)) dx with
/// V0 = Vbar + abar x^2 / 2. Raw (unnormalized) value.
double psi(const ModelSpec& spec, double A);

struct CriticalSigma {
  bool transition = false;  // false: abar <= 0, no phase transition
  double sigma = 0.0;
  double g_at_sigma = 0.0;  // Var - sigma^2/(2 abar) at the returned point
};

/// Root of Var_{sigma, A=0}(V0) - sigma^2 / (2 abar) on the bracket.
CriticalSigma critical_sigma(const ModelSpec& spec, double lo = 0.05, double hi = 5.0);

/// I_2 / (sigma^2 I_0) for U = V_k + abar_k x^2 / 2.
double zeta(const ModelSpec& spec, int k, double sigma);

/// Uniqueness of the zero solution: zeta_k(sigma_k) < 1 / (2 abar_k) for
/// every k with abar_k > 0.
struct NoiseCertificate {
  bool unique_zero = false;
  std::vector<double> zeta;
  std::vector<double> threshold;
};
NoiseCertificate large_noise_certificate(const ModelSpec& spec);

struct PhaseRow {
  double sigma;
  int n_solutions;
  double m_max;
};
std::vector<PhaseRow> phase_scan(const ModelSpec& spec, double from, double to, int steps,
                                 const SolveOptions& opts = {});

}  // namespace mskv
