#include "mskv/candidates.hpp"

#include <algorithm>
#include <cmath>

#include "exact.hpp"
#include "mskv/error.hpp"
#include "mskv/rng.hpp"
#include "mskv/sturm.hpp"

namespace mskv {

namespace {

void require_1d(const ModelSpec& spec) {
  check_dimensions(spec);
  if (spec.d != 1) throw validation_error("candidates", "DimensionUnsupported", "requires d = 1");
}

double sup_norm(const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

Eigen::VectorXd grad_map(const ModelSpec& spec, const std::vector<Polynomial>& dV, const Magnetization& m) {
  Eigen::VectorXd G(spec.M);
  for (int k = 0; k < spec.M; ++k) {
    double s = dV[static_cast<std::size_t>(k)](m(k));
    for (int l = 0; l < spec.M; ++l) s += spec.a[static_cast<std::size_t>(l)] * spec.alpha(k, l) * (m(k) - m(l));
    G(k) = s;
  }
  return G;
}

Eigen::MatrixXd grad_jacobian(const ModelSpec& spec, const std::vector<Polynomial>& d2V, const Magnetization& m) {
  Eigen::MatrixXd J(spec.M, spec.M);
  for (int k = 0; k < spec.M; ++k) {
    for (int j = 0; j < spec.M; ++j) J(k, j) = -spec.a[static_cast<std::size_t>(j)] * spec.alpha(k, j);
    J(k, k) += d2V[static_cast<std::size_t>(k)](m(k)) + alpha_bar(spec, k);
  }
  return J;
}

bool newton(const ModelSpec& spec, const std::vector<Polynomial>& dV, const std::vector<Polynomial>& d2V,
            Magnetization& m, double& residual) {
  Eigen::VectorXd G = grad_map(spec, dV, m);
  double r = sup_norm(G);
  // Iterate past the 1e-12 target while steps still shrink the residual:
  // degenerate roots (e.g. G ~ m^3) converge only linearly and would
  // otherwise stop far from the root.
  for (int it = 0; it < 200 && r > 0.0; ++it) {
    const Eigen::VectorXd step = grad_jacobian(spec, d2V, m).fullPivLu().solve(-G);
    if (!step.allFinite() || sup_norm(step) <= 1e-15 * std::max(1.0, sup_norm(m))) break;
    bool moved = false;
    double t = 1.0;
    for (int h = 0; h < 30; ++h, t *= 0.5) {
      const Magnetization trial = m + t * step;
      const Eigen::VectorXd Gt = grad_map(spec, dV, trial);
      const double rt = sup_norm(Gt);
      if (rt < r) {
        m = trial;
        G = Gt;
        r = rt;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  residual = r;
  return std::isfinite(r) && r <= 1e-9;
}

}  // namespace

double effective_grad(const ModelSpec& spec, const Magnetization& m, int k, double x) {
  double s = spec.V[static_cast<std::size_t>(k)].derivative()(x);
  for (int l = 0; l < spec.M; ++l) s += spec.a[static_cast<std::size_t>(l)] * spec.alpha(k, l) * (x - m(l));
  return s;
}

std::vector<Candidate> solve_candidates(const ModelSpec& spec) {
  require_1d(spec);
  const int M = spec.M;
  std::vector<Polynomial> dV, d2V;
  for (const auto& V : spec.V) {
    dV.push_back(V.derivative());
    d2V.push_back(V.derivative(2));
  }

  // Per-species candidate values: zero, critical points of V_k and of W_{(0),k}.
  std::vector<std::vector<double>> values(static_cast<std::size_t>(M));
  double reach = 1.0;
  for (int k = 0; k < M; ++k) {
    auto& v = values[static_cast<std::size_t>(k)];
    v.push_back(0.0);
    for (double x : dV[static_cast<std::size_t>(k)].real_roots()) v.push_back(x);
    for (double x : effective_potential(spec, k).derivative().real_roots()) v.push_back(x);
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    for (double x : v) reach = std::max(reach, std::fabs(x));
  }

  std::vector<Magnetization> seeds{Magnetization::Zero(M)};
  auto cartesian = [&](const std::vector<std::vector<double>>& axes) {
    std::vector<std::size_t> idx(static_cast<std::size_t>(M), 0);
    while (true) {
      Magnetization s(M);
      for (int k = 0; k < M; ++k) s(k) = axes[static_cast<std::size_t>(k)][idx[static_cast<std::size_t>(k)]];
      seeds.push_back(s);
      int k = 0;
      for (; k < M; ++k) {
        auto& i = idx[static_cast<std::size_t>(k)];
        if (++i < axes[static_cast<std::size_t>(k)].size()) break;
        i = 0;
      }
      if (k == M) break;
    }
  };
  double product = 1.0;
  for (const auto& v : values) product *= static_cast<double>(v.size());
  if (product <= 5000.0) cartesian(values);

  int G = static_cast<int>(std::floor(std::pow(4096.0, 1.0 / M) + 1e-9));
  G = std::clamp(G, 2, 21);
  const double R = 1.5 * reach + 0.5;
  std::vector<double> axis;
  for (int i = 0; i < G; ++i) axis.push_back(-R + 2.0 * R * i / (G - 1));
  cartesian(std::vector<std::vector<double>>(static_cast<std::size_t>(M), axis));

  rng::Sequence seq(2024, rng::kSeeds);
  for (int i = 0; i < 8; ++i) {
    Magnetization s(M);
    for (int k = 0; k < M; ++k) s(k) = -R + 2.0 * R * seq.uniform();
    seeds.push_back(s);
  }

  std::vector<Candidate> found;
  for (auto m : seeds) {
    double res = 0.0;
    if (!newton(spec, dV, d2V, m, res)) continue;
    bool dup = false;
    for (const auto& c : found)
      if (sup_norm(c.m0 - m) <= 1e-7 * std::max(1.0, sup_norm(m))) dup = true;
    if (dup) continue;
    Candidate c;
    c.m0 = m;
    c.grad_residual = res;
    found.push_back(std::move(c));
  }

  for (auto& c : found) {
    for (int k = 0; k < M; ++k) {
      double abs_sum = 0.0, A = 0.0;
      for (int l = 0; l < M; ++l) {
        abs_sum += spec.a[static_cast<std::size_t>(l)] * std::fabs(spec.alpha(k, l));
        A += spec.a[static_cast<std::size_t>(l)] * spec.alpha(k, l) * c.m0(l);
      }
      const double ab = alpha_bar(spec, k);
      const double mk = c.m0(k);
      c.yasmeen2_margins.push_back(d2V[static_cast<std::size_t>(k)](mk) + ab - abs_sum);

      // W_{(m0),k} up to an additive constant.
      const Polynomial W = spec.V[static_cast<std::size_t>(k)] + Polynomial{0.0, -A, 0.5 * ab};
      bool global = W.degree() >= 2 && W.degree() % 2 == 0 && W.leading() > 0.0;
      if (global) {
        const double wm = W(mk);
        for (double x : W.derivative().real_roots())
          if (std::fabs(x - mk) > 1e-8 && !(W(x) > wm + 1e-10)) global = false;
      }
      c.global_min_flags.push_back(global);
    }
  }

  std::sort(found.begin(), found.end(), [](const Candidate& x, const Candidate& y) {
    return std::lexicographical_compare(x.m0.begin(), x.m0.end(), y.m0.begin(), y.m0.end());
  });
  return found;
}

TwoSpeciesReduction two_species_reduction(const ModelSpec& spec) {
  check_dimensions(spec);
  auto reject = [](const std::string& why) { return validation_error("candidates", "NotTwoSpeciesSymmetric", why); };
  if (spec.M != 2 || spec.d != 1) throw reject("requires M = 2 and d = 1");
  if (!(spec.V[0] == spec.V[1])) throw reject("requires V_1 = V_2");
  if (spec.alpha(0, 1) != spec.alpha(1, 0)) throw reject("requires alpha_12 = alpha_21");
  const double a = spec.a[0];
  const double alpha = spec.alpha(0, 1);
  if (!(a > 0.0) || alpha == 0.0) throw reject("requires a_1 > 0 and alpha_12 != 0");
  const Polynomial& V = spec.V[0];
  const int n = V.degree();
  if (n < 2) throw reject("requires deg V >= 2");

  using namespace exact;
  const RPoly Vr = from_polynomial(V);
  const Rational ra = to_rational(a), ralpha = to_rational(alpha);
  const RPoly u = scale(derivative(Vr), Rational(1) / (ra * ralpha));
  RPoly P{ralpha};
  RPoly d = derivative(derivative(Vr));
  RPoly upow{Rational(1)};
  Integer fact = 1;
  for (int i = 0; i <= n - 2; ++i) {
    fact *= (i + 1);
    P = add(P, scale(mul(d, upow), Rational(1) / Rational(fact)));
    d = derivative(d);
    upow = mul(upow, u);
  }

  TwoSpeciesReduction out;
  out.poly = to_polynomial(P);
  out.positive_root_count = count_positive_roots(P);
  const Polynomial dV = V.derivative();
  for (double m2 : out.poly.real_roots()) {
    out.m2_roots.push_back(m2);
    out.m1.push_back(m2 + dV(m2) / (a * alpha));
  }
  return out;
}

Polynomial reduction_in_square(const Polynomial& even_poly) {
  if (!even_poly.is_even()) throw validation_error("candidates", "NotEven", "reduction is not even in m2");
  std::vector<double> c;
  for (int i = 0; i <= even_poly.degree(); i += 2) c.push_back(even_poly.coeff(i));
  Polynomial Q(std::move(c));
  if (Q.is_zero()) return Q;
  return (1.0 / Q.leading()) * Q;
}

std::string to_string(CubicKind kind) {
  switch (kind) {
    case CubicKind::ThreeDistinctPositive: return "ThreeDistinctPositive";
    case CubicKind::DoublePlusSimplePositive: return "DoublePlusSimplePositive";
    case CubicKind::OnePositiveTwoComplex: return "OnePositiveTwoComplex";
    case CubicKind::TriplePositive: return "TriplePositive";
    case CubicKind::Other: return "Other";
  }
  return "Other";
}

double cubic_discriminant(double p, double q, double r) {
  return -27.0 * r * r + 18.0 * p * q * r - 4.0 * q * q * q - 4.0 * p * p * p * r + p * p * q * q;
}

CubicClassification classify_cubic(double p, double q, double r) {
  using exact::Rational;
  const Rational P = exact::to_rational(p), Q = exact::to_rational(q), R = exact::to_rational(r);
  const Rational D = -27 * R * R + 18 * P * Q * R - 4 * Q * Q * Q - 4 * P * P * P * R + P * P * Q * Q;
  const int sd = D > 0 ? 1 : (D < 0 ? -1 : 0);
  const bool p2_eq_3q = P * P == 3 * Q;

  CubicClassification c{p, q, r, static_cast<double>(D), CubicKind::Other};
  if (sd > 0 && p < 0 && q > 0 && r < 0) {
    c.kind = CubicKind::ThreeDistinctPositive;
  } else if (sd == 0 && !p2_eq_3q && p < 0 && q > 0 && r < 0) {
    c.kind = CubicKind::DoublePlusSimplePositive;
  } else if (sd < 0 && r < 0) {
    c.kind = CubicKind::OnePositiveTwoComplex;
  } else if (sd == 0 && p2_eq_3q && p < 0) {
    c.kind = CubicKind::TriplePositive;
  }
  return c;
}

namespace {

void check_region_domain(double A, double B) {
  if (!(A > 0.0 && A < 1.0 && B > 0.0 && B < 2.0 / 3.0))
    throw validation_error("candidates", "OutOfDomain", "need 0 < A < 1 and 0 < B < 2/3");
}

}  // namespace

bool three_root_region(double A, double B) {
  check_region_domain(A, B);
  const double c = 1.0 / 3.0 - 2.0 * std::sqrt(1.0 - A) / (3.0 * std::sqrt(3.0));
  return B * B - A * B + c < 0.0;
}

double three_root_region_lhs(double A, double B) {
  const double p = 3.0 * B - 2.0;
  const double q = 3.0 * B * B - 3.0 * B + 1.0;
  const double r = B * B * (A - 1.0);
  return -27.0 * r * r + 18.0 * p * q * r - 4.0 * q * q * q - 4.0 * p * p * p * r + p * p * q * q;
}

bool three_root_region_direct(double A, double B) {
  check_region_domain(A, B);
  return three_root_region_lhs(A, B) > 0.0;
}

QuadraticStationaryResult quadratic_stationary(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q, double a,
                                               const QuadraticAlpha& al, double sigma) {
  const auto d = p.rows();
  auto bad = [](const std::string& name, const std::string& why) { return validation_error("candidates", name, why); };
  for (const Eigen::MatrixXd* m : {&p, &q, &al.a11, &al.a12, &al.a21, &al.a22})
    if (m->rows() != d || m->cols() != d) throw bad("BadDimensions", "all matrices must be d x d");
  if (d < 1) throw bad("BadDimensions", "d must be >= 1");
  for (const Eigen::MatrixXd* m : {&p, &q, &al.a11, &al.a12, &al.a21, &al.a22})
    if ((*m - m->transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, m->cwiseAbs().maxCoeff()))
      throw bad("NonSymmetric", "matrices must be symmetric");
  if (!(a >= 0.0 && a < 1.0)) throw bad("BadWeights", "need 0 <= a < 1");
  if (!(sigma > 0.0)) throw bad("NonPositiveSigma", "sigma must be > 0");
  for (const Eigen::MatrixXd* m : {&p, &q})
    if (Eigen::LLT<Eigen::MatrixXd>(*m).info() != Eigen::Success) throw bad("NotPositiveDefinite", "p and q must be SPD");

  Eigen::JacobiSVD<Eigen::MatrixXd> svd12(al.a12);
  const auto s12 = svd12.singularValues();
  if (!(s12(d - 1) > 1e-12 * s12(0))) throw bad("SingularAlpha12", "alpha_12 is not invertible");

  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(d, d);
  const Eigen::MatrixXd S = al.a12.fullPivLu().solve(p) / (1.0 - a) + I;
  QuadraticStationaryResult res;
  res.T = -a * al.a21 + (q + a * al.a21) * S;

  const double c = 2.0 / (sigma * sigma);
  res.precision1 = c * (p + a * al.a11 + (1.0 - a) * al.a12);
  res.precision2 = c * (q + a * al.a21 + (1.0 - a) * al.a22);
  for (const Eigen::MatrixXd* m : {&res.precision1, &res.precision2})
    if (Eigen::LLT<Eigen::MatrixXd>(*m).info() != Eigen::Success)
      throw bad("IndefinitePrecision", "Gaussian precision matrix is not positive definite");

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(res.T, Eigen::ComputeFullV);
  const auto sv = svd.singularValues();
  const double cut = 1e-10 * sv(0);
  res.m1 = Eigen::VectorXd::Zero(d);
  res.m2 = Eigen::VectorXd::Zero(d);
  if (sv(0) > 0.0 && sv(d - 1) > cut) {
    res.kind = QuadraticKind::UniqueZero;
    return res;
  }
  res.kind = QuadraticKind::InfiniteFamily;
  std::vector<Eigen::Index> cols;
  for (Eigen::Index i = 0; i < d; ++i)
    if (sv(i) <= cut) cols.push_back(i);
  res.null_basis_m1.resize(d, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) res.null_basis_m1.col(static_cast<Eigen::Index>(j)) = svd.matrixV().col(cols[j]);
  res.null_basis_m2 = S * res.null_basis_m1;
  res.m1 = res.null_basis_m1.col(0);
  res.m2 = res.null_basis_m2.col(0);
  return res;
}

}  // namespace mskv
