#pragma once

#include <cstdint>
#include <vector>

#include "mskv/model.hpp"

namespace mskv {

enum class InteractionMode { FastQuadratic, PairwiseGeneric };

struct InitialLaw {
  enum class Kind { Gaussian, Uniform, Dirac };
  Kind kind = Kind::Gaussian;
  double p1 = 0.0;  // gaussian: mean, uniform: lower end, dirac: location
  double p2 = 1.0;  // gaussian: variance, uniform: upper end
  static InitialLaw gaussian(double mean, double var) { return {Kind::Gaussian, mean, var}; }
  static InitialLaw uniform(double lo, double hi) { return {Kind::Uniform, lo, hi}; }
  static InitialLaw dirac(double x0) { return {Kind::Dirac, x0, 0.0}; }
};

struct SimOptions {
  double dt = 1e-3;
  double t_end = 1.0;
  int record_every = 100;
  InteractionMode interaction_mode = InteractionMode::FastQuadratic;
  /// One law per species, or a single law for all; empty means gaussian(0,1).
  std::vector<InitialLaw> init;
  /// Flip the sign of every standard normal draw (initial and increments).
  bool mirror_noise = false;
};

/// positions[k] holds N_k points of dimension d, row-major.
struct ParticleEnsemble {
  int d = 1;
  std::vector<std::vector<double>> positions;
  double t = 0.0;
  std::uint64_t seed = 0;
  std::int64_t step_count = 0;

  int count(int k) const { return static_cast<int>(positions.at(static_cast<std::size_t>(k)).size()) / d; }
};

/// means[k][r] is the first-coordinate mean of species k at record r;
/// second_moments[k][r] is the mean of |X|^2.
struct TrajectorySummary {
  std::vector<double> times;
  std::vector<std::vector<double>> means;
  std::vector<std::vector<double>> second_moments;
  ParticleEnsemble final_ensemble;
};

/// Largest admissible Euler-Maruyama step.
double dt_guard(const ModelSpec& spec);

/// Initial ensemble drawn from opts.init with the kInit stream of seed.
ParticleEnsemble initial_ensemble(const ModelSpec& spec, const std::vector<int>& N, const SimOptions& opts,
                                  std::uint64_t seed);

/// Interaction force (1/N) sum_l sum_j alpha_kl (x_i - x_j), written into
/// out with the layout of ens.positions; the drift is its negative.
void interaction_drift(const ModelSpec& spec, const ParticleEnsemble& ens, InteractionMode mode,
                       std::vector<std::vector<double>>& out);

/// Confining force -grad V_k at each particle, same layout.
void confining_drift(const ModelSpec& spec, const ParticleEnsemble& ens, std::vector<std::vector<double>>& out);

TrajectorySummary simulate_particles(const ModelSpec& spec, const std::vector<int>& N, const SimOptions& opts,
                                     std::uint64_t seed);

/// Continues an existing ensemble for opts.t_end more time units.
TrajectorySummary continue_particles(const ModelSpec& spec, ParticleEnsemble ens, const SimOptions& opts);

TrajectorySummary simulate_meanfield(const ModelSpec& spec, int N_cloud, const SimOptions& opts, std::uint64_t seed);

struct PocPoint {
  int N = 0;
  double error = 0.0;
  double standard_error = 0.0;
  bool blow_up = false;
};

/// Monte-Carlo estimate of E[sup_t |X_t^{1,1} - Xbar_t^1|^2] for each N.
std::vector<PocPoint> poc_error(const ModelSpec& spec, const std::vector<int>& N_list, const SimOptions& opts,
                                std::uint64_t seed, int reps);

/// Per-species particle counts round(N * M * a_k), at least 1.
std::vector<int> species_counts(const ModelSpec& spec, int N);

/// Pairwise (fixed-order) sum of v[offset + i*stride], i < n.
double pairwise_sum(const double* v, std::size_t n, std::size_t stride);

}  // namespace mskv
