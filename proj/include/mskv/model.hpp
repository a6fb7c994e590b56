#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "mskv/polynomial.hpp"

namespace mskv {

/// Problem data for M interacting species. F_kl(x) = alpha(k,l) |x|^2 / 2.
struct ModelSpec {
  int M = 1;
  int d = 1;
  std::vector<double> a;
  std::vector<double> sigma;
  std::vector<Polynomial> V;
  Eigen::MatrixXd alpha;
};

/// Shared profile when every species has the same V_k/sigma_k^2 and
/// alpha_k./sigma_k^2. Taken from species 0.
struct StructuralData {
  Polynomial Vbar;
  double sigma = 0.0;
  std::vector<double> alpha;  // alpha_l := alpha(0, l)
};

struct AssumptionReport {
  bool symmetric = false;
  bool structural = false;
  std::optional<StructuralData> structure;
  bool synchronization = false;
  std::vector<double> theta;         // sup_x -V_k''
  std::vector<double> alpha_row_sum;  // sum_l alpha_kl
  std::vector<double> alpha_bar;      // sum_l a_l alpha_kl
  bool nonneg_alpha = false;
};

/// Relaxations used by the particle simulators; the analysis modules use
/// the strict defaults.
struct ValidateOptions {
  bool allow_zero_sigma = false;
  bool allow_zero_self_interaction = false;
};

/// Hard checks (throws mskv::Error) plus the optional-assumption flags.
AssumptionReport validate(const ModelSpec& spec, const ValidateOptions& opts = {});

/// Only the shape checks: lengths, matrix size, M >= 1, d >= 1.
void check_dimensions(const ModelSpec& spec);

struct ThetaResult {
  double value;
  double argmax;
};
ThetaResult theta_detail(const ModelSpec& spec, int k);
double theta_k(const ModelSpec& spec, int k);

/// sum_l a_l alpha_kl.
double alpha_bar(const ModelSpec& spec, int k);
/// V_k + alpha_bar_k x^2 / 2, the potential of the Gibbs weight of species k.
Polynomial effective_potential(const ModelSpec& spec, int k);

/// Relative coefficientwise closeness used by the assumption flags.
inline constexpr double kFlagTol = 1e-10;

/// Copy with sigma_k -> s * sigma_k / sigma_0 so that sigma_0 becomes s.
ModelSpec with_sigma_scale(const ModelSpec& spec, double s);

ModelSpec model_from_json_text(const std::string& text);
ModelSpec load_model(const std::string& path);
std::string model_to_json_text(const ModelSpec& spec);
std::string report_to_json_text(const AssumptionReport& report);

/// Applies a dotted override such as "sigma.0=0.5", "alpha.0.1=0.3",
/// "V.1.4=0.25", "a.0=0.3", "M=2".
void apply_override(ModelSpec& spec, const std::string& assignment);

}  // namespace mskv
