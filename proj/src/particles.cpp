#include "mskv/particles.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "mskv/error.hpp"
#include "mskv/rng.hpp"

namespace mskv {

double pairwise_sum(const double* v, std::size_t n, std::size_t stride) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i * stride];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(v, h, stride) + pairwise_sum(v + h * stride, n - h, stride);
}

namespace {

constexpr double kBlowUp = 1e8;

using Means = std::vector<std::vector<double>>;  // [species][coordinate]

AssumptionReport validate_for_simulation(const ModelSpec& spec) {
  return validate(spec, ValidateOptions{true, true});
}

// grad V(x) = h(|x|^2) x for V(x) = sum_j c_{2j} |x|^{2j}.
Polynomial radial_factor(const Polynomial& V) {
  std::vector<double> h;
  for (int j = 1; 2 * j <= V.degree(); ++j) h.push_back(2.0 * j * V.coeff(2 * j));
  return Polynomial(std::move(h));
}

Means species_means(const std::vector<std::vector<double>>& pos, int d) {
  Means m(pos.size(), std::vector<double>(static_cast<std::size_t>(d), 0.0));
  for (std::size_t k = 0; k < pos.size(); ++k) {
    const std::size_t n = pos[k].size() / static_cast<std::size_t>(d);
    for (int c = 0; c < d; ++c)
      m[k][static_cast<std::size_t>(c)] = pairwise_sum(pos[k].data() + c, n, static_cast<std::size_t>(d)) / static_cast<double>(n);
  }
  return m;
}

void check_options(const ModelSpec& spec, const SimOptions& opts) {
  if (!(opts.dt > 0.0)) throw validation_error("particles", "BadOptions", "dt must be > 0");
  if (!(opts.t_end >= 0.0)) throw validation_error("particles", "BadOptions", "t_end must be >= 0");
  if (opts.record_every < 1) throw validation_error("particles", "BadOptions", "record_every must be >= 1");
  const double guard = dt_guard(spec);
  if (opts.dt > guard)
    throw validation_error("particles", "StepTooLarge", "dt exceeds stability guard " + std::to_string(guard));
  if (!opts.init.empty() && opts.init.size() != 1 && static_cast<int>(opts.init.size()) != spec.M)
    throw validation_error("particles", "BadOptions", "init needs 1 or M laws");
}

struct Engine {
  const ModelSpec& spec;
  std::vector<Polynomial> h;
  double dt;
  bool mirror;

  Engine(const ModelSpec& s, double dt_, bool mirror_) : spec(s), dt(dt_), mirror(mirror_) {
    for (const auto& V : s.V) h.push_back(radial_factor(V));
  }

  // One Euler-Maruyama step of species k. The interaction drift is either
  // sum_l w_l alpha_kl (x - mean_l) or, when given, the precomputed array.
  void advance(int k, std::vector<double>& pos, int d, const std::vector<double>& w, const Means& means,
               const std::vector<double>* pair_drift, std::uint64_t seed, std::int64_t step, std::uint32_t stream,
               std::size_t first = 0, std::size_t count = static_cast<std::size_t>(-1)) const {
    const double sig = spec.sigma[static_cast<std::size_t>(k)];
    const double noise_scale = sig * std::sqrt(dt) * (mirror ? -1.0 : 1.0);
    const Polynomial& hk = h[static_cast<std::size_t>(k)];
    const std::size_t n = std::min(pos.size() / static_cast<std::size_t>(d), first + count);
    bool bad = false;
#pragma omp parallel for schedule(static) reduction(|| : bad)
    for (std::size_t i = first; i < n; ++i) {
      double* x = pos.data() + i * static_cast<std::size_t>(d);
      double s = 0.0;
      for (int c = 0; c < d; ++c) s += x[c] * x[c];
      const double hv = hk(s);
      std::array<double, 2> z{};
      for (int c = 0; c < d; ++c) {
        double drift = -hv * x[c];
        if (pair_drift) {
          drift -= (*pair_drift)[i * static_cast<std::size_t>(d) + static_cast<std::size_t>(c)];
        } else {
          double inter = 0.0;
          for (int l = 0; l < spec.M; ++l)
            inter += w[static_cast<std::size_t>(l)] * spec.alpha(k, l) *
                     (x[c] - means[static_cast<std::size_t>(l)][static_cast<std::size_t>(c)]);
          drift -= inter;
        }
        if (c % 2 == 0)
          z = rng::normal_pair(seed, static_cast<std::uint64_t>(step), static_cast<std::uint32_t>(i),
                               static_cast<std::uint32_t>(k), stream, static_cast<std::uint32_t>(c / 2));
        x[c] += drift * dt + noise_scale * z[static_cast<std::size_t>(c % 2)];
        if (!(std::fabs(x[c]) <= kBlowUp)) bad = true;
      }
    }
    if (bad)
      throw numerical_error("particles", "BlowUp",
                            "|X| > 1e8 at step " + std::to_string(step) + ", species " + std::to_string(k));
  }
};

ParticleEnsemble draw_initial(const ModelSpec& spec, const std::vector<int>& N, const SimOptions& opts,
                              std::uint64_t seed, std::uint32_t stream) {
  if (static_cast<int>(N.size()) != spec.M) throw validation_error("particles", "BadDimensions", "need M counts");
  ParticleEnsemble ens;
  ens.d = spec.d;
  ens.seed = seed;
  const double flip = opts.mirror_noise ? -1.0 : 1.0;
  for (int k = 0; k < spec.M; ++k) {
    const int n = N[static_cast<std::size_t>(k)];
    if (n < 1) throw validation_error("particles", "EmptySpecies", "N_k must be >= 1");
    InitialLaw law;
    if (opts.init.size() == 1) law = opts.init[0];
    if (static_cast<int>(opts.init.size()) == spec.M) law = opts.init[static_cast<std::size_t>(k)];
    std::vector<double> pos(static_cast<std::size_t>(n) * static_cast<std::size_t>(spec.d));
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < spec.d; c += 2) {
        const auto blk = static_cast<std::uint32_t>(c / 2);
        const auto u = rng::uniform_pair(seed, 0, static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(k), stream, blk);
        const auto z = rng::normal_pair(seed, 0, static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(k), stream, blk);
        for (int e = 0; e < 2 && c + e < spec.d; ++e) {
          double v = 0.0;
          switch (law.kind) {
            case InitialLaw::Kind::Gaussian: v = law.p1 + std::sqrt(law.p2) * flip * z[static_cast<std::size_t>(e)]; break;
            case InitialLaw::Kind::Uniform: v = law.p1 + (law.p2 - law.p1) * u[static_cast<std::size_t>(e)]; break;
            case InitialLaw::Kind::Dirac: v = law.p1; break;
          }
          pos[static_cast<std::size_t>(i) * static_cast<std::size_t>(spec.d) + static_cast<std::size_t>(c + e)] = v;
        }
      }
    ens.positions.push_back(std::move(pos));
  }
  return ens;
}

void record(TrajectorySummary& out, const ParticleEnsemble& ens) {
  out.times.push_back(ens.t);
  const auto m = species_means(ens.positions, ens.d);
  for (std::size_t k = 0; k < ens.positions.size(); ++k) {
    const auto& p = ens.positions[k];
    std::vector<double> sq(p.size() / static_cast<std::size_t>(ens.d));
    for (std::size_t i = 0; i < sq.size(); ++i) {
      double s = 0.0;
      for (int c = 0; c < ens.d; ++c) s += p[i * static_cast<std::size_t>(ens.d) + static_cast<std::size_t>(c)] *
                                          p[i * static_cast<std::size_t>(ens.d) + static_cast<std::size_t>(c)];
      sq[i] = s;
    }
    out.means[k].push_back(m[k][0]);
    out.second_moments[k].push_back(pairwise_sum(sq.data(), sq.size(), 1) / static_cast<double>(sq.size()));
  }
}

std::vector<double> count_weights(const ParticleEnsemble& ens) {
  double total = 0.0;
  for (int k = 0; k < static_cast<int>(ens.positions.size()); ++k) total += ens.count(k);
  std::vector<double> w;
  for (int k = 0; k < static_cast<int>(ens.positions.size()); ++k) w.push_back(ens.count(k) / total);
  return w;
}

TrajectorySummary run(const ModelSpec& spec, ParticleEnsemble ens, const SimOptions& opts,
                      const std::vector<double>& weights, InteractionMode mode) {
  const Engine eng(spec, opts.dt, opts.mirror_noise);
  TrajectorySummary out;
  out.means.resize(static_cast<std::size_t>(spec.M));
  out.second_moments.resize(static_cast<std::size_t>(spec.M));
  const auto steps = static_cast<std::int64_t>(std::llround(opts.t_end / opts.dt));
  const double t0 = ens.t;
  const std::int64_t s0 = ens.step_count;
  record(out, ens);
  std::vector<std::vector<double>> pair;
  for (std::int64_t s = 1; s <= steps; ++s) {
    const Means means = species_means(ens.positions, ens.d);
    if (mode == InteractionMode::PairwiseGeneric) interaction_drift(spec, ens, mode, pair);
    for (int k = 0; k < spec.M; ++k)
      eng.advance(k, ens.positions[static_cast<std::size_t>(k)], ens.d, weights, means,
                  mode == InteractionMode::PairwiseGeneric ? &pair[static_cast<std::size_t>(k)] : nullptr, ens.seed,
                  ens.step_count, rng::kNoise);
    ++ens.step_count;
    ens.t = t0 + static_cast<double>(ens.step_count - s0) * opts.dt;
    if (s % opts.record_every == 0 || s == steps) record(out, ens);
  }
  out.final_ensemble = std::move(ens);
  return out;
}

}  // namespace

double dt_guard(const ModelSpec& spec) {
  check_dimensions(spec);
  double theta_max = 0.0, inter = 0.0, curv = 0.0;
  for (int k = 0; k < spec.M; ++k) {
    theta_max = std::max(theta_max, theta_k(spec, k));
    double s = 0.0;
    for (int l = 0; l < spec.M; ++l) s += spec.a[static_cast<std::size_t>(l)] * std::fabs(spec.alpha(k, l));
    inter = std::max(inter, s);
    const Polynomial& V = spec.V[static_cast<std::size_t>(k)];
    const int n = V.degree();
    curv = std::max(curv, n * (n - 1) * std::fabs(V.leading()) * std::pow(5.0, n - 2));
  }
  return 0.5 / (theta_max + inter + curv);
}

std::vector<int> species_counts(const ModelSpec& spec, int N) {
  std::vector<int> n;
  for (double w : spec.a) n.push_back(std::max(1, static_cast<int>(std::lround(N * spec.M * w))));
  return n;
}

ParticleEnsemble initial_ensemble(const ModelSpec& spec, const std::vector<int>& N, const SimOptions& opts,
                                  std::uint64_t seed) {
  return draw_initial(spec, N, opts, seed, rng::kInit);
}

void confining_drift(const ModelSpec& spec, const ParticleEnsemble& ens, std::vector<std::vector<double>>& out) {
  out.resize(ens.positions.size());
  for (std::size_t k = 0; k < ens.positions.size(); ++k) {
    const Polynomial hk = radial_factor(spec.V[k]);
    const auto& p = ens.positions[k];
    out[k].assign(p.size(), 0.0);
    const auto d = static_cast<std::size_t>(ens.d);
    for (std::size_t i = 0; i < p.size() / d; ++i) {
      double s = 0.0;
      for (std::size_t c = 0; c < d; ++c) s += p[i * d + c] * p[i * d + c];
      const double hv = hk(s);
      for (std::size_t c = 0; c < d; ++c) out[k][i * d + c] = -hv * p[i * d + c];
    }
  }
}

void interaction_drift(const ModelSpec& spec, const ParticleEnsemble& ens, InteractionMode mode,
                       std::vector<std::vector<double>>& out) {
  const auto d = static_cast<std::size_t>(ens.d);
  double total = 0.0;
  for (int k = 0; k < spec.M; ++k) total += ens.count(k);
  out.resize(ens.positions.size());
  if (mode == InteractionMode::FastQuadratic) {
    const Means means = species_means(ens.positions, ens.d);
    for (int k = 0; k < spec.M; ++k) {
      const auto& p = ens.positions[static_cast<std::size_t>(k)];
      auto& o = out[static_cast<std::size_t>(k)];
      o.assign(p.size(), 0.0);
      for (std::size_t i = 0; i < p.size() / d; ++i)
        for (std::size_t c = 0; c < d; ++c) {
          double s = 0.0;
          for (int l = 0; l < spec.M; ++l)
            s += (ens.count(l) / total) * spec.alpha(k, l) * (p[i * d + c] - means[static_cast<std::size_t>(l)][c]);
          o[i * d + c] = s;
        }
    }
    return;
  }
  for (int k = 0; k < spec.M; ++k) {
    const auto& p = ens.positions[static_cast<std::size_t>(k)];
    auto& o = out[static_cast<std::size_t>(k)];
    o.assign(p.size(), 0.0);
    const std::size_t nk = p.size() / d;
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < nk; ++i)
      for (std::size_t c = 0; c < d; ++c) {
        double s = 0.0;
        for (int l = 0; l < spec.M; ++l) {
          const auto& q = ens.positions[static_cast<std::size_t>(l)];
          double sl = 0.0;
          for (std::size_t j = 0; j < q.size() / d; ++j) sl += p[i * d + c] - q[j * d + c];
          s += spec.alpha(k, l) * sl;
        }
        o[i * d + c] = s / total;
      }
  }
}

TrajectorySummary simulate_particles(const ModelSpec& spec, const std::vector<int>& N, const SimOptions& opts,
                                     std::uint64_t seed) {
  validate_for_simulation(spec);
  check_options(spec, opts);
  ParticleEnsemble ens = draw_initial(spec, N, opts, seed, rng::kInit);
  const auto w = count_weights(ens);
  return run(spec, std::move(ens), opts, w, opts.interaction_mode);
}

TrajectorySummary continue_particles(const ModelSpec& spec, ParticleEnsemble ens, const SimOptions& opts) {
  validate_for_simulation(spec);
  check_options(spec, opts);
  const auto w = count_weights(ens);
  return run(spec, std::move(ens), opts, w, opts.interaction_mode);
}

TrajectorySummary simulate_meanfield(const ModelSpec& spec, int N_cloud, const SimOptions& opts, std::uint64_t seed) {
  validate_for_simulation(spec);
  check_options(spec, opts);
  if (opts.interaction_mode != InteractionMode::FastQuadratic)
    throw validation_error("particles", "BadOptions", "mean-field simulation supports FastQuadratic only");
  ParticleEnsemble ens =
      draw_initial(spec, std::vector<int>(static_cast<std::size_t>(spec.M), N_cloud), opts, seed, rng::kInit);
  return run(spec, std::move(ens), opts, spec.a, InteractionMode::FastQuadratic);
}

std::vector<PocPoint> poc_error(const ModelSpec& spec, const std::vector<int>& N_list, const SimOptions& opts,
                                std::uint64_t seed, int reps) {
  validate_for_simulation(spec);
  check_options(spec, opts);
  if (reps < 2) throw validation_error("particles", "BadOptions", "reps must be >= 2");
  const Engine eng(spec, opts.dt, opts.mirror_noise);
  const auto steps = static_cast<std::int64_t>(std::llround(opts.t_end / opts.dt));
  const auto d = static_cast<std::size_t>(spec.d);

  std::vector<std::uint64_t> rep_seeds;
  std::uint64_t state = seed;
  for (int r = 0; r < reps; ++r) rep_seeds.push_back(rng::splitmix64(state));

  std::vector<PocPoint> out;
  for (int N : N_list) {
    const auto counts = species_counts(spec, N);
    std::vector<double> sup(static_cast<std::size_t>(reps), 0.0);
    bool blew = false;
    for (int r = 0; r < reps && !blew; ++r) {
      const std::uint64_t s = rep_seeds[static_cast<std::size_t>(r)];
      ParticleEnsemble sys = draw_initial(spec, counts, opts, s, rng::kInit);
      ParticleEnsemble aux = draw_initial(spec, counts, opts, s, rng::kAuxInit);
      const auto wsys = count_weights(sys);
      // The surrogate tracks the tagged particle (species 0, index 0).
      std::vector<double> bar(sys.positions[0].begin(), sys.positions[0].begin() + static_cast<std::ptrdiff_t>(d));
      double worst = 0.0;
      try {
        for (std::int64_t step = 0; step < steps; ++step) {
          const Means ms = species_means(sys.positions, spec.d);
          const Means ma = species_means(aux.positions, spec.d);
          for (int k = 0; k < spec.M; ++k) {
            eng.advance(k, sys.positions[static_cast<std::size_t>(k)], spec.d, wsys, ms, nullptr, s, step, rng::kNoise);
            eng.advance(k, aux.positions[static_cast<std::size_t>(k)], spec.d, spec.a, ma, nullptr, s, step,
                        rng::kAuxNoise);
          }
          eng.advance(0, bar, spec.d, spec.a, ma, nullptr, s, step, rng::kNoise, 0, 1);
          double dist = 0.0;
          for (std::size_t c = 0; c < d; ++c) {
            const double diff = sys.positions[0][c] - bar[c];
            dist += diff * diff;
          }
          worst = std::max(worst, dist);
        }
      } catch (const Error& e) {
        if (e.name() != "BlowUp") throw;
        blew = true;
      }
      sup[static_cast<std::size_t>(r)] = worst;
    }
    PocPoint p;
    p.N = N;
    p.blow_up = blew;
    if (blew) {
      p.error = std::numeric_limits<double>::infinity();
      p.standard_error = std::numeric_limits<double>::infinity();
    } else {
      double mean = 0.0;
      for (double v : sup) mean += v;
      mean /= reps;
      double var = 0.0;
      for (double v : sup) var += (v - mean) * (v - mean);
      var /= (reps - 1);
      p.error = mean;
      p.standard_error = std::sqrt(var / reps);
    }
    out.push_back(p);
  }
  return out;
}

}  // namespace mskv
