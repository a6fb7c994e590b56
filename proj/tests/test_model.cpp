#include <doctest.h>

#include "mskv/error.hpp"
#include "mskv/model.hpp"
#include "oracles.hpp"

using namespace mskv;

namespace {

ModelSpec two_species() {
  ModelSpec s;
  s.M = 2;
  s.a = {0.5, 0.5};
  s.sigma = {1.0, 1.0};
  s.V = {Polynomial{0, 0, -0.5, 0, 0.25}, Polynomial{0, 0, -0.5, 0, 0.25}};
  s.alpha.resize(2, 2);
  s.alpha << 1.0, 0.5, 0.5, 1.0;
  return s;
}

std::string error_name(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.name();
  }
  return "";
}

}  // namespace

TEST_CASE("validate flags on a manifestly good spec") {
  const auto r = validate(two_species());
  CHECK(r.symmetric);
  CHECK_FALSE(r.structural);  // rows of alpha differ
  CHECK(r.synchronization);  // theta = 1 < 1.5
  CHECK(r.nonneg_alpha);
  CHECK(r.alpha_bar[0] == doctest::Approx(0.75));
}

TEST_CASE("validate rejects broken specs") {
  auto s = two_species();
  s.alpha(0, 0) = -1.0;
  CHECK(error_name([&] { validate(s); }) == "NonPositiveSelfInteraction");

  s = two_species();
  s.a = {0.5, 0.6};
  CHECK(error_name([&] { validate(s); }) == "BadWeights");
  s = two_species();
  s.sigma[1] = 0.0;
  CHECK(error_name([&] { validate(s); }) == "NonPositiveSigma");
  CHECK_NOTHROW(validate(s, {true, false}));
  s = two_species();
  s.V[0] = Polynomial{0, 1.0, 1.0};
  CHECK(error_name([&] { validate(s); }) == "NonEvenPotential");
  s.V[0] = Polynomial{0, 0, 1.0, 0, -1.0};
  CHECK(error_name([&] { validate(s); }) == "NonPositiveLeading");
  s = two_species();
  s.sigma.pop_back();
  CHECK(error_name([&] { validate(s); }) == "BadDimensions");
}

TEST_CASE("structural reduction under species-dependent noise") {
  ModelSpec s = two_species();
  s.sigma = {1.0, 2.0};
  s.V = {Polynomial{0, 0, -0.5, 0, 0.25}, Polynomial{0, 0, -2.0, 0, 1.0}};
  s.alpha << 1.0, 1.0, 4.0, 4.0;
  const auto r = validate(s);
  REQUIRE(r.structural);
  CHECK(r.structure->Vbar == s.V[0]);
  CHECK(r.structure->sigma == 1.0);
  CHECK(r.structure->alpha == std::vector<double>{1.0, 1.0});
  CHECK_FALSE(r.symmetric);

  // Joint rescaling of species 2 keeps the flag.
  for (double c : {0.3, 2.5}) {
    ModelSpec t = s;
    t.sigma[1] *= c;
    t.V[1] = c * c * t.V[1];
    t.alpha.row(1) *= c * c;
    CHECK(validate(t).structural);
  }
  s.alpha(1, 0) = 4.1;
  CHECK_FALSE(validate(s).structural);
}

TEST_CASE("theta") {
  ModelSpec s = two_species();
  CHECK(theta_k(s, 0) == doctest::Approx(1.0));
  CHECK(theta_detail(s, 0).argmax == doctest::Approx(0.0));
  s.V[1] = Polynomial{0, 0, 0.5};
  CHECK(theta_k(s, 1) == doctest::Approx(-1.0));

  const std::vector<double> c6{0, 0, -0.5, 0, 0, 0, 1.0 / 6.0};
  s.V[0] = Polynomial(c6);
  // -V'' = 1 - 5x^4
  const double scan = oracle::grid_max([](double x) { return 1.0 - 5.0 * std::pow(x, 4); }, -10.0, 10.0, 2000000);
  CHECK(theta_k(s, 0) == doctest::Approx(scan).epsilon(1e-9));
}

TEST_CASE("synchronization flag follows theta against row sums") {
  ModelSpec s = two_species();
  s.alpha << 0.4, 0.5, 0.5, 0.4;  // theta = 1 > 0.9 on both rows
  auto r = validate(s);
  CHECK_FALSE(r.synchronization);
  for (int k = 0; k < 2; ++k) CHECK((r.theta[k] < r.alpha_row_sum[k]) == r.synchronization);
}

TEST_CASE("json round trip and overrides") {
  const ModelSpec s = two_species();
  const ModelSpec t = model_from_json_text(model_to_json_text(s));
  CHECK(t.V == s.V);
  CHECK(t.alpha == s.alpha);
  CHECK(t.sigma == s.sigma);

  ModelSpec u = s;
  apply_override(u, "sigma.0=0.5");
  apply_override(u, "alpha.0.1=0.3");
  apply_override(u, "V.1.6=0.1");
  CHECK(u.sigma[0] == 0.5);
  CHECK(u.alpha(0, 1) == 0.3);
  CHECK(u.V[1].degree() == 6);
  CHECK(error_name([&] { apply_override(u, "nonsense"); }) == "BadOverride");
  CHECK(error_name([] { load_model("/nonexistent/model.json"); }) == "BadModelFile");
  CHECK(error_name([] { model_from_json_text("{\"M\": 2"); }) == "BadModelFile");
}

TEST_CASE("effective potential and sigma scaling") {
  const ModelSpec s = two_species();
  CHECK(effective_potential(s, 0) == Polynomial{0, 0, -0.5 + 0.375, 0, 0.25});
  ModelSpec t = s;
  t.sigma = {1.0, 2.0};
  const ModelSpec u = with_sigma_scale(t, 0.5);
  CHECK(u.sigma == std::vector<double>{0.5, 1.0});
}
