#include "mskv/model.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mskv/error.hpp"

namespace mskv {

using nlohmann::json;

namespace {

bool close_rel(double x, double y) {
  return std::fabs(x - y) <= kFlagTol * std::max({1.0, std::fabs(x), std::fabs(y)});
}

std::string idx(int k) { return "species " + std::to_string(k); }

}  // namespace

void check_dimensions(const ModelSpec& spec) {
  if (spec.M < 1) throw validation_error("model", "BadDimensions", "M must be >= 1");
  if (spec.d < 1) throw validation_error("model", "BadDimensions", "d must be >= 1");
  const auto M = static_cast<std::size_t>(spec.M);
  if (spec.a.size() != M || spec.sigma.size() != M || spec.V.size() != M)
    throw validation_error("model", "BadDimensions", "a, sigma and V must have length M");
  if (spec.alpha.rows() != spec.M || spec.alpha.cols() != spec.M)
    throw validation_error("model", "BadDimensions", "alpha must be M x M");
}

double alpha_bar(const ModelSpec& spec, int k) {
  double s = 0.0;
  for (int l = 0; l < spec.M; ++l) s += spec.a[static_cast<std::size_t>(l)] * spec.alpha(k, l);
  return s;
}

Polynomial effective_potential(const ModelSpec& spec, int k) {
  return spec.V[static_cast<std::size_t>(k)] + Polynomial::monomial(0.5 * alpha_bar(spec, k), 2);
}

ThetaResult theta_detail(const ModelSpec& spec, int k) {
  const Polynomial& V = spec.V.at(static_cast<std::size_t>(k));
  if (V.degree() < 2) throw validation_error("model", "DegenerateDegree", idx(k) + " has degree < 2");
  const Polynomial neg2 = -1.0 * V.derivative(2);
  if (V.degree() == 2) return {neg2(0.0), 0.0};
  ThetaResult best{-std::numeric_limits<double>::infinity(), 0.0};
  for (double x : V.derivative(3).real_roots()) {
    const double v = neg2(x);
    if (v > best.value) best = {v, x};
  }
  return best;
}

double theta_k(const ModelSpec& spec, int k) { return theta_detail(spec, k).value; }

AssumptionReport validate(const ModelSpec& spec, const ValidateOptions& opts) {
  check_dimensions(spec);
  const int M = spec.M;

  double asum = 0.0;
  for (double w : spec.a) {
    if (!(w >= 0.0 && w <= 1.0)) throw validation_error("model", "BadWeights", "weights must lie in [0,1]");
    asum += w;
  }
  if (std::fabs(asum - 1.0) > 1e-12) throw validation_error("model", "BadWeights", "weights must sum to 1");

  for (int k = 0; k < M; ++k) {
    const double s = spec.sigma[static_cast<std::size_t>(k)];
    if (!std::isfinite(s) || s < 0.0 || (s == 0.0 && !opts.allow_zero_sigma))
      throw validation_error("model", "NonPositiveSigma", idx(k));
    const Polynomial& V = spec.V[static_cast<std::size_t>(k)];
    if (!V.is_even()) throw validation_error("model", "NonEvenPotential", idx(k));
    if (V.degree() < 2 || V.leading() <= 0.0)
      throw validation_error("model", "NonPositiveLeading", idx(k) + " needs even degree >= 2 and positive leading coefficient");
    const double akk = spec.alpha(k, k);
    if (!(akk > 0.0) && !(akk == 0.0 && opts.allow_zero_self_interaction))
      throw validation_error("model", "NonPositiveSelfInteraction", idx(k));
  }
  for (int k = 0; k < M; ++k)
    for (int l = 0; l < M; ++l)
      if (!std::isfinite(spec.alpha(k, l))) throw validation_error("model", "BadDimensions", "alpha must be finite");

  AssumptionReport r;
  r.symmetric = true;
  r.nonneg_alpha = true;
  for (int k = 0; k < M; ++k)
    for (int l = 0; l < M; ++l) {
      if (!close_rel(spec.alpha(k, l), spec.alpha(l, k))) r.symmetric = false;
      if (spec.alpha(k, l) < 0.0) r.nonneg_alpha = false;
    }

  r.synchronization = true;
  for (int k = 0; k < M; ++k) {
    r.theta.push_back(theta_k(spec, k));
    r.alpha_row_sum.push_back(spec.alpha.row(k).sum());
    r.alpha_bar.push_back(alpha_bar(spec, k));
    if (!(r.theta.back() < r.alpha_row_sum.back())) r.synchronization = false;
  }

  // Structural: V_k / sigma_k^2 and alpha_k. / sigma_k^2 independent of k.
  bool structural = true;
  const double s0 = spec.sigma[0];
  if (s0 == 0.0) structural = false;
  for (int k = 1; k < M && structural; ++k) {
    const double sk = spec.sigma[static_cast<std::size_t>(k)];
    if (sk == 0.0) {
      structural = false;
      break;
    }
    const double c0 = 1.0 / (s0 * s0), ck = 1.0 / (sk * sk);
    const Polynomial& V0 = spec.V[0];
    const Polynomial& Vk = spec.V[static_cast<std::size_t>(k)];
    const int n = std::max(V0.degree(), Vk.degree());
    for (int i = 0; i <= n; ++i)
      if (!close_rel(V0.coeff(i) * c0, Vk.coeff(i) * ck)) structural = false;
    for (int l = 0; l < M; ++l)
      if (!close_rel(spec.alpha(0, l) * c0, spec.alpha(k, l) * ck)) structural = false;
  }
  r.structural = structural;
  if (structural) {
    StructuralData sd;
    sd.Vbar = spec.V[0];
    sd.sigma = s0;
    for (int l = 0; l < M; ++l) sd.alpha.push_back(spec.alpha(0, l));
    r.structure = sd;
  }
  return r;
}

ModelSpec with_sigma_scale(const ModelSpec& spec, double s) {
  ModelSpec out = spec;
  const double s0 = spec.sigma.at(0);
  for (auto& v : out.sigma) v = s * v / s0;
  return out;
}

namespace {

ModelSpec from_json(const json& j) {
  ModelSpec spec;
  spec.M = j.at("M").get<int>();
  spec.d = j.value("d", 1);
  spec.a = j.at("a").get<std::vector<double>>();
  spec.sigma = j.at("sigma").get<std::vector<double>>();
  for (const auto& v : j.at("V")) spec.V.emplace_back(v.get<std::vector<double>>());
  const auto rows = j.at("alpha").get<std::vector<std::vector<double>>>();
  if (static_cast<int>(rows.size()) != spec.M)
    throw validation_error("model", "BadDimensions", "alpha must have M rows");
  spec.alpha.resize(spec.M, spec.M);
  for (int k = 0; k < spec.M; ++k) {
    if (static_cast<int>(rows[static_cast<std::size_t>(k)].size()) != spec.M)
      throw validation_error("model", "BadDimensions", "alpha must have M columns");
    for (int l = 0; l < spec.M; ++l) spec.alpha(k, l) = rows[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)];
  }
  check_dimensions(spec);
  return spec;
}

json to_json(const ModelSpec& spec) {
  json j;
  j["M"] = spec.M;
  j["d"] = spec.d;
  j["a"] = spec.a;
  j["sigma"] = spec.sigma;
  json V = json::array();
  for (const auto& p : spec.V) V.push_back(std::vector<double>(p.coeffs().begin(), p.coeffs().end()));
  j["V"] = V;
  json A = json::array();
  for (int k = 0; k < spec.M; ++k) {
    std::vector<double> row;
    for (int l = 0; l < spec.M; ++l) row.push_back(spec.alpha(k, l));
    A.push_back(row);
  }
  j["alpha"] = A;
  return j;
}

}  // namespace

ModelSpec model_from_json_text(const std::string& text) {
  try {
    return from_json(json::parse(text));
  } catch (const json::exception& e) {
    throw validation_error("model", "BadModelFile", e.what());
  }
}

ModelSpec load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("model", "BadModelFile", "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return model_from_json_text(ss.str());
}

std::string model_to_json_text(const ModelSpec& spec) { return to_json(spec).dump(); }

std::string report_to_json_text(const AssumptionReport& r) {
  json j;
  j["symmetric"] = r.symmetric;
  j["structural"] = r.structural;
  if (r.structure) {
    const auto& s = *r.structure;
    j["structure"] = {{"Vbar", std::vector<double>(s.Vbar.coeffs().begin(), s.Vbar.coeffs().end())},
                      {"sigma", s.sigma},
                      {"alpha", s.alpha}};
  }
  j["synchronization"] = r.synchronization;
  j["theta"] = r.theta;
  j["alpha_row_sum"] = r.alpha_row_sum;
  j["alpha_bar"] = r.alpha_bar;
  j["nonneg_alpha"] = r.nonneg_alpha;
  return j.dump(2);
}

void apply_override(ModelSpec& spec, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw validation_error("cli", "BadOverride", assignment);
  const std::string key = assignment.substr(0, eq);
  double value = 0.0;
  try {
    std::size_t used = 0;
    value = std::stod(assignment.substr(eq + 1), &used);
    if (used != assignment.size() - eq - 1) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw validation_error("cli", "BadOverride", "value is not a number: " + assignment);
  }

  // Round-trip through JSON so every field is addressable the same way.
  json j = to_json(spec);
  json* node = &j;
  std::stringstream ks(key);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ks, part, '.')) parts.push_back(part);
  if (parts.empty()) throw validation_error("cli", "BadOverride", assignment);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const std::string& p = parts[i];
    if (node->is_object()) {
      if (!node->contains(p)) throw validation_error("cli", "BadOverride", "unknown key " + key);
      node = &(*node)[p];
    } else if (node->is_array()) {
      std::size_t n = 0;
      try {
        n = std::stoul(p);
      } catch (const std::exception&) {
        throw validation_error("cli", "BadOverride", "bad index in " + key);
      }
      // Polynomial coefficient lists may be extended.
      while (node->size() <= n && parts.size() - i == 1) node->push_back(0.0);
      if (n >= node->size()) throw validation_error("cli", "BadOverride", "index out of range in " + key);
      node = &(*node)[n];
    } else {
      throw validation_error("cli", "BadOverride", "key too deep: " + key);
    }
  }
  if (node->is_number_integer() && (parts[0] == "M" || parts[0] == "d")) {
    *node = static_cast<int>(value);
  } else if (node->is_number()) {
    *node = value;
  } else {
    throw validation_error("cli", "BadOverride", "key does not name a number: " + key);
  }
  spec = from_json(j);
}

}  // namespace mskv
