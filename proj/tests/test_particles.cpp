#include <doctest.h>

#include <omp.h>
#include <unsupported/Eigen/MatrixFunctions>

#include <random>

#include "mskv/candidates.hpp"
#include "mskv/error.hpp"
#include "mskv/particles.hpp"
#include "mskv/selfconsist.hpp"
#include "oracles.hpp"

using namespace mskv;

namespace {

ModelSpec gaussian_spec(const std::vector<double>& p, const Eigen::MatrixXd& alpha) {
  ModelSpec s;
  s.M = static_cast<int>(p.size());
  s.a.assign(p.size(), 1.0 / static_cast<double>(p.size()));
  s.sigma.assign(p.size(), 1.0);
  for (double v : p) s.V.push_back(Polynomial{0, 0, v / 2});
  s.alpha = alpha;
  return s;
}

double sample_sd(const std::vector<double>& x) {
  double m = 0, v = 0;
  for (double e : x) m += e;
  m /= static_cast<double>(x.size());
  for (double e : x) v += (e - m) * (e - m);
  return std::sqrt(v / static_cast<double>(x.size() - 1));
}

}  // namespace

TEST_CASE("zero-noise particles rest at a candidate") {
  auto s = oracle::double_well(3, 0.0);
  const auto cands = solve_candidates(oracle::double_well(3, 1.0));
  for (const auto& c : cands) {
    SimOptions o;
    o.dt = 0.005;
    o.t_end = 2.0;
    for (int k = 0; k < 3; ++k) o.init.push_back(InitialLaw::dirac(c.m0(k)));
    const auto tr = simulate_particles(s, {1, 1, 1}, o, 1);
    for (int k = 0; k < 3; ++k) CHECK(tr.final_ensemble.positions[k][0] == doctest::Approx(c.m0(k)).epsilon(1e-15));
  }
}

TEST_CASE("Ornstein-Uhlenbeck species mean") {
  const double kappa = 1.5;
  auto s = gaussian_spec({kappa}, Eigen::MatrixXd::Zero(1, 1));
  SimOptions o;
  o.dt = 1e-3;
  o.t_end = 1.0;
  o.init = {InitialLaw::gaussian(2.0, 0.25)};
  const auto tr = simulate_particles(s, {10000}, o, 11);
  for (std::size_t r = 0; r < tr.times.size(); ++r) {
    const double t = tr.times[r];
    const double var = 0.25 * std::exp(-2 * kappa * t) + (1 - std::exp(-2 * kappa * t)) / (2 * kappa);
    CHECK(std::abs(tr.means[0][r] - 2.0 * std::exp(-kappa * t)) < 3.0 * std::sqrt(var / 10000));
  }
}

TEST_CASE("coupled Gaussian means follow the linear ODE") {
  Eigen::MatrixXd alpha(2, 2);
  alpha << 1.0, 2.0, 0.5, 1.0;
  auto s = gaussian_spec({1.0, 0.5}, alpha);
  SimOptions o;
  o.dt = 1e-3;
  o.t_end = 2.0;
  o.record_every = 500;
  o.init = {InitialLaw::gaussian(1.0, 0.1), InitialLaw::gaussian(-2.0, 0.1)};
  const auto tr = simulate_particles(s, {10000, 10000}, o, 5);
  // m_k' = -p_k m_k - sum_l a_l alpha_kl (m_k - m_l)
  const Eigen::Vector2d p(1.0, 0.5);
  Eigen::Matrix2d A;
  for (int k = 0; k < 2; ++k) {
    A(k, k) = -p(k);
    for (int l = 0; l < 2; ++l)
      if (l != k) {
        A(k, l) = 0.5 * alpha(k, l);
        A(k, k) -= 0.5 * alpha(k, l);
      }
  }
  const Eigen::Vector2d m0(1.0, -2.0);
  for (std::size_t r = 0; r < tr.times.size(); ++r) {
    const Eigen::Vector2d m = (A * tr.times[r]).exp() * m0;
    for (int k = 0; k < 2; ++k) {
      const double se = sample_sd(tr.final_ensemble.positions[k]) / std::sqrt(10000.0);
      CHECK(std::abs(tr.means[k][r] - m(k)) < 3.0 * se);
    }
  }
}

TEST_CASE("fast and pairwise interaction forces agree") {
  std::mt19937_64 gen(17);
  std::normal_distribution<double> nd(0.3, 1.2);
  for (int d : {1, 2, 3}) {
    ModelSpec s = oracle::double_well(3);
    s.d = d;
    s.alpha << 1.0, 0.3, -0.2, 0.3, 2.0, 0.7, -0.2, 0.7, 0.5;
    ParticleEnsemble e;
    e.d = d;
    for (int n : {37, 120, 200}) {
      std::vector<double> p(static_cast<std::size_t>(n * d));
      for (auto& v : p) v = nd(gen);
      e.positions.push_back(p);
    }
    std::vector<std::vector<double>> fast, pair;
    interaction_drift(s, e, InteractionMode::FastQuadratic, fast);
    interaction_drift(s, e, InteractionMode::PairwiseGeneric, pair);
    double scale = 0.0, diff = 0.0;
    for (std::size_t k = 0; k < 3; ++k)
      for (std::size_t i = 0; i < fast[k].size(); ++i) {
        scale = std::max(scale, std::abs(pair[k][i]));
        diff = std::max(diff, std::abs(fast[k][i] - pair[k][i]));
      }
    CHECK(diff <= 1e-10 * scale);
  }
}

TEST_CASE("bit-identical results regardless of thread count") {
  auto s = oracle::double_well(2, 0.8);
  SimOptions o;
  o.dt = 0.005;
  o.t_end = 1.0;
  omp_set_num_threads(1);
  const auto a = simulate_particles(s, {500, 300}, o, 99);
  omp_set_num_threads(4);
  const auto b = simulate_particles(s, {500, 300}, o, 99);
  CHECK(a.final_ensemble.positions == b.final_ensemble.positions);
  CHECK(a.means == b.means);
  o.interaction_mode = InteractionMode::PairwiseGeneric;
  const auto c = simulate_particles(s, {500, 300}, o, 99);
  omp_set_num_threads(1);
  const auto d = simulate_particles(s, {500, 300}, o, 99);
  CHECK(c.final_ensemble.positions == d.final_ensemble.positions);
}

TEST_CASE("mirror symmetry of the scheme") {
  auto s = oracle::double_well(3, 0.7);
  SimOptions o;
  o.dt = 0.005;
  o.t_end = 2.0;
  o.record_every = 10;
  o.init = {InitialLaw::gaussian(0.9, 0.2)};
  const auto a = simulate_meanfield(s, 400, o, 3);
  o.init = {InitialLaw::gaussian(-0.9, 0.2)};
  o.mirror_noise = true;
  const auto b = simulate_meanfield(s, 400, o, 3);
  for (std::size_t k = 0; k < 3; ++k)
    for (std::size_t r = 0; r < a.times.size(); ++r) CHECK(a.means[k][r] == -b.means[k][r]);
}

TEST_CASE("uncoupled mean-field cloud equals the particle system") {
  auto s = oracle::double_well(2, 0.9);
  s.alpha.setZero();
  SimOptions o;
  o.dt = 0.005;
  o.t_end = 1.0;
  const auto a = simulate_meanfield(s, 300, o, 8);
  const auto b = simulate_particles(s, {300, 300}, o, 8);
  CHECK(a.final_ensemble.positions == b.final_ensemble.positions);
}

TEST_CASE("mean-field cloud converges to the positive stationary branch") {
  auto s = oracle::double_well(1, 0.6);
  const auto set = solve_selfconsistency(s);
  const double mstar = set.solutions.back()(0);
  REQUIRE(mstar > 0.5);
  SimOptions o;
  o.dt = 0.005;
  o.t_end = 50.0;
  o.record_every = 1000;
  o.init = {InitialLaw::gaussian(0.9, 0.05)};
  const auto tr = simulate_meanfield(s, 20000, o, 21);
  CHECK(std::abs(tr.means[0].back() - mstar) < 5e-2);
}

TEST_CASE("propagation of chaos") {
  auto s = oracle::double_well(2, 0.8);
  SimOptions o;
  o.dt = 0.005;
  o.t_end = 1.0;
  s.alpha.setZero();
  for (const auto& p : poc_error(s, {20, 80}, o, 4, 4)) CHECK(p.error < 1e-28);

  s = oracle::double_well(2, 0.8);
  const auto pts = poc_error(s, {10, 640}, o, 4, 16);
  CHECK(pts[0].error > pts[1].error);
  CHECK_FALSE(pts[1].blow_up);

  auto quiet = oracle::double_well(2, 0.1);
  o.t_end = 4.0;
  for (const auto& p : poc_error(quiet, {20}, o, 4, 4)) {
    CHECK_FALSE(p.blow_up);
    CHECK(std::isfinite(p.error));
  }
}

TEST_CASE("second moments stay bounded") {
  auto s = oracle::double_well(2, 1.0);
  SimOptions o;
  o.dt = 0.005;
  o.t_end = 100.0;
  o.record_every = 200;
  o.init = {InitialLaw::uniform(-3.0, 3.0)};
  const auto tr = simulate_particles(s, {500, 500}, o, 2);
  for (const auto& row : tr.second_moments)
    for (double v : row) CHECK(v < 4.0);
}

TEST_CASE("guards and counts") {
  const auto s = oracle::double_well(3);
  const double g = dt_guard(s);
  CHECK(g == doctest::Approx(0.5 / (1.0 + 1.0 + 12.0 * 0.25 * 25.0)));
  SimOptions o;
  o.dt = 2 * g;
  CHECK_THROWS_AS(simulate_particles(s, {10, 10, 10}, o, 1), Error);
  CHECK(species_counts(s, 100) == std::vector<int>{100, 100, 100});
  o.dt = 0.001;
  CHECK_THROWS_AS(simulate_particles(s, {10, 0, 10}, o, 1), Error);

  // Initial laws.
  o.t_end = 0.0;
  o.init = {InitialLaw::uniform(-1.0, 3.0)};
  const auto e = initial_ensemble(s, {20000, 1, 1}, o, 4);
  double mean = 0.0;
  for (double v : e.positions[0]) {
    CHECK(v > -1.0);
    CHECK(v < 3.0);
    mean += v / 20000.0;
  }
  CHECK(mean == doctest::Approx(1.0).epsilon(0.02));
  CHECK(sample_sd(e.positions[0]) == doctest::Approx(4.0 / std::sqrt(12.0)).epsilon(0.02));
}
