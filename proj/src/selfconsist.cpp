#include "mskv/selfconsist.hpp"

#include <algorithm>
#include <cmath>

#include "mskv/error.hpp"
#include "mskv/quad.hpp"
#include "mskv/rng.hpp"

namespace mskv {

namespace {

void require_1d(const ModelSpec& spec, const char* op) {
  check_dimensions(spec);
  if (spec.d != 1) throw validation_error("selfconsist", "DimensionUnsupported", std::string(op) + " requires d = 1");
}

// a_l alpha_kl
Eigen::MatrixXd weighted_alpha(const ModelSpec& spec) {
  Eigen::MatrixXd W = spec.alpha;
  for (int l = 0; l < spec.M; ++l) W.col(l) *= spec.a[static_cast<std::size_t>(l)];
  return W;
}

double sup_norm(const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

struct Structure {
  Polynomial V0;
  double sigma;
  double abar;
};

Structure structure_of(const ModelSpec& spec) {
  const auto rep = validate(spec);
  if (!rep.structural) throw validation_error("selfconsist", "StructuralRequired", "structural assumption does not hold");
  const double ab = alpha_bar(spec, 0);
  return {effective_potential(spec, 0), spec.sigma[0], ab};
}

}  // namespace

PhiEval phi_eval(const ModelSpec& spec, const Magnetization& m) {
  require_1d(spec, "phi_map");
  if (m.size() != spec.M) throw validation_error("selfconsist", "BadDimensions", "magnetization length must be M");
  const Eigen::VectorXd A = weighted_alpha(spec) * m;
  PhiEval out{Magnetization(spec.M), Eigen::VectorXd(spec.M)};
  for (int k = 0; k < spec.M; ++k) {
    const auto g = make_gibbs(effective_potential(spec, k), spec.sigma[static_cast<std::size_t>(k)], A(k));
    const auto mom = gibbs_moments(g, 2);
    out.value(k) = mom.mean();
    out.variance(k) = mom.variance();
  }
  return out;
}

Magnetization phi_map(const ModelSpec& spec, const Magnetization& m) { return phi_eval(spec, m).value; }

std::vector<Magnetization> default_seeds(const ModelSpec& spec, std::uint64_t rng_seed, int n_random) {
  const int M = spec.M;
  std::vector<double> mags;
  auto collect = [&](const Polynomial& p) {
    for (double r : p.real_roots())
      if (r > 1e-12) mags.push_back(r);
  };
  for (int k = 0; k < M; ++k) {
    const Polynomial& V = spec.V[static_cast<std::size_t>(k)];
    collect(effective_potential(spec, k).derivative());
    collect(V.derivative());
  }
  std::sort(mags.begin(), mags.end());
  mags.erase(std::unique(mags.begin(), mags.end(), [](double x, double y) { return std::fabs(x - y) < 1e-9; }),
             mags.end());

  std::vector<Magnetization> seeds;
  seeds.push_back(Magnetization::Zero(M));
  for (double c : mags) {
    if (M <= 10) {
      for (unsigned mask = 0; mask < (1u << M); ++mask) {
        Magnetization s(M);
        for (int k = 0; k < M; ++k) s(k) = (mask >> k & 1u) ? -c : c;
        seeds.push_back(s);
      }
    } else {
      seeds.push_back(Magnetization::Constant(M, c));
      seeds.push_back(Magnetization::Constant(M, -c));
    }
  }
  rng::Sequence seq(rng_seed, rng::kSeeds);
  for (int i = 0; i < n_random; ++i) {
    Magnetization s(M);
    for (int k = 0; k < M; ++k) s(k) = -3.0 + 6.0 * seq.uniform();
    seeds.push_back(s);
  }
  return seeds;
}

namespace {

struct SeedResult {
  bool converged = false;
  Magnetization m;
  double residual = 0.0;
};

SeedResult solve_from(const ModelSpec& spec, const Eigen::MatrixXd& Wa, Magnetization m, const SolveOptions& opts) {
  constexpr double kNewtonStart = 1e-3;
  constexpr double kMinDamping = 1.0 / 16.0;
  Eigen::VectorXd beta(spec.M);
  for (int k = 0; k < spec.M; ++k) {
    const double s = spec.sigma[static_cast<std::size_t>(k)];
    beta(k) = 2.0 / (s * s);
  }

  PhiEval ev = phi_eval(spec, m);
  double r = sup_norm(ev.value - m);
  double gamma = opts.damping;
  int stall = 0;
  for (int it = 0; it < opts.max_iter; ++it) {
    if (r <= opts.tol) return {true, m, r};

    // Newton on Phi(m) - m once close, or periodically when Picard is slow.
    if (r < kNewtonStart || (it >= 50 && it % 10 == 0)) {
      const Eigen::MatrixXd J = beta.cwiseProduct(ev.variance).asDiagonal() * Wa;
      const Eigen::MatrixXd G = Eigen::MatrixXd::Identity(spec.M, spec.M) - J;
      const Eigen::VectorXd step = G.fullPivLu().solve(ev.value - m);
      bool moved = false;
      double t = 1.0;
      for (int h = 0; h < 8 && step.allFinite(); ++h, t *= 0.5) {
        const Magnetization trial = m + t * step;
        try {
          PhiEval te = phi_eval(spec, trial);
          const double tr = sup_norm(te.value - trial);
          if (tr < r) {
            m = trial;
            ev = std::move(te);
            r = tr;
            moved = true;
            break;
          }
        } catch (const Error&) {
        }
      }
      if (moved) continue;
    }

    const Magnetization next = (1.0 - gamma) * m + gamma * ev.value;
    PhiEval ne = phi_eval(spec, next);
    const double nr = sup_norm(ne.value - next);
    if (nr >= r) {
      if (++stall >= 5) {
        gamma = std::max(0.5 * gamma, kMinDamping);
        stall = 0;
      }
    } else {
      stall = 0;
    }
    m = next;
    ev = std::move(ne);
    r = nr;
  }
  return {r <= opts.tol, m, r};
}

}  // namespace

StationarySet solve_selfconsistency(const ModelSpec& spec, const SolveOptions& opts) {
  require_1d(spec, "solve_selfconsistency");
  if (!(opts.tol > 0.0) || opts.dedupe_tol < opts.tol || !(opts.damping > 0.0 && opts.damping <= 1.0))
    throw validation_error("selfconsist", "BadOptions", "need tol > 0, dedupe_tol >= tol, damping in (0,1]");

  std::vector<Magnetization> seeds;
  seeds.push_back(Magnetization::Zero(spec.M));
  for (const auto& s : opts.seeds) seeds.push_back(s);
  if (opts.use_default_seeds) {
    auto def = default_seeds(spec, opts.rng_seed);
    seeds.insert(seeds.end(), def.begin() + 1, def.end());
  }

  const Eigen::MatrixXd Wa = weighted_alpha(spec);
  std::vector<SeedResult> results(seeds.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    try {
      results[i] = solve_from(spec, Wa, seeds[i], opts);
    } catch (const Error&) {
      results[i] = SeedResult{};
    }
  }

  StationarySet out;
  int converged = 0;
  for (const auto& res : results) {
    if (!res.converged) continue;
    ++converged;
    bool dup = false;
    for (const auto& s : out.solutions)
      if (sup_norm(s - res.m) <= opts.dedupe_tol) dup = true;
    if (dup) continue;
    out.solutions.push_back(res.m);
    out.residuals.push_back(res.residual);
  }
  out.converged_fraction = static_cast<double>(converged) / static_cast<double>(seeds.size());

  // Lexicographic order, residuals following their solutions.
  std::vector<std::size_t> idx(out.solutions.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) {
    const auto& u = out.solutions[x];
    const auto& v = out.solutions[y];
    return std::lexicographical_compare(u.begin(), u.end(), v.begin(), v.end());
  });
  StationarySet sorted;
  sorted.converged_fraction = out.converged_fraction;
  for (std::size_t i : idx) {
    sorted.solutions.push_back(out.solutions[i]);
    sorted.residuals.push_back(out.residuals[i]);
  }
  return sorted;
}

double psi(const ModelSpec& spec, double A) {
  require_1d(spec, "psi");
  const auto st = structure_of(spec);
  if (st.abar == 0.0) throw validation_error("selfconsist", "DegenerateInteraction", "abar must be nonzero");
  const auto mom = gibbs_moments(make_gibbs(st.V0, st.sigma, A), 1);
  return mom.raw(1) - (A / st.abar) * mom.raw(0);
}

CriticalSigma critical_sigma(const ModelSpec& spec, double lo, double hi) {
  require_1d(spec, "critical_sigma");
  const auto st = structure_of(spec);
  CriticalSigma out;
  if (st.abar <= 0.0) return out;
  if (!(lo > 0.0 && lo < hi)) throw validation_error("selfconsist", "NoBracket", "bracket must satisfy 0 < lo < hi");
  auto g = [&](double s) { return gibbs_variance_at_zero_tilt(st.V0, s) - s * s / (2.0 * st.abar); };
  double glo = g(lo);
  const double ghi = g(hi);
  if (glo == 0.0) return {true, lo, 0.0};
  if (ghi == 0.0) return {true, hi, 0.0};
  if ((glo > 0.0) == (ghi > 0.0)) throw numerical_error("selfconsist", "NoBracket", "no sign change of g on bracket");
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if (gm == 0.0) {
      lo = hi = mid;
      break;
    }
    if ((gm > 0.0) == (glo > 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  out.transition = true;
  out.sigma = 0.5 * (lo + hi);
  out.g_at_sigma = g(out.sigma);
  return out;
}

double zeta(const ModelSpec& spec, int k, double sigma) {
  require_1d(spec, "zeta");
  const auto mom = gibbs_moments(make_gibbs(effective_potential(spec, k), sigma, 0.0), 2);
  return mom.normalized(2) / (sigma * sigma);
}

NoiseCertificate large_noise_certificate(const ModelSpec& spec) {
  require_1d(spec, "large_noise_certificate");
  NoiseCertificate c;
  c.unique_zero = true;
  for (int k = 0; k < spec.M; ++k) {
    const double ab = alpha_bar(spec, k);
    c.zeta.push_back(zeta(spec, k, spec.sigma[static_cast<std::size_t>(k)]));
    c.threshold.push_back(ab > 0.0 ? 1.0 / (2.0 * ab) : std::numeric_limits<double>::infinity());
    if (ab > 0.0 && !(c.zeta.back() < c.threshold.back())) c.unique_zero = false;
  }
  return c;
}

std::vector<PhaseRow> phase_scan(const ModelSpec& spec, double from, double to, int steps, const SolveOptions& opts) {
  if (steps < 1) throw validation_error("selfconsist", "BadOptions", "steps must be >= 1");
  std::vector<PhaseRow> rows;
  for (int i = 0; i < steps; ++i) {
    const double s = steps == 1 ? from : from + (to - from) * i / (steps - 1);
    const auto set = solve_selfconsistency(with_sigma_scale(spec, s), opts);
    double mmax = 0.0;
    for (const auto& m : set.solutions) mmax = std::max(mmax, sup_norm(m));
    rows.push_back({s, static_cast<int>(set.solutions.size()), mmax});
  }
  return rows;
}

}  // namespace mskv
