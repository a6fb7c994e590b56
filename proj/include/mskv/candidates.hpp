#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "mskv/model.hpp"
#include "mskv/selfconsist.hpp"

namespace mskv {

struct Candidate {
  Magnetization m0;
  double grad_residual = 0.0;
  std::vector<double> yasmeen2_margins;  // W''_{(m0),k}(m0_k) - sum_l a_l |alpha_kl|
  std::vector<bool> global_min_flags;
};

/// W'_{(m),k}(x) = V_k'(x) + sum_l a_l alpha_kl (x - m_l).
double effective_grad(const ModelSpec& spec, const Magnetization& m, int k, double x);

/// Zero-noise candidates, deduplicated and sorted lexicographically.
std::vector<Candidate> solve_candidates(const ModelSpec& spec);

struct TwoSpeciesReduction {
  Polynomial poly;               // in m2
  int positive_root_count = 0;   // exact Sturm count on (0, inf)
  std::vector<double> m2_roots;  // all real roots, ascending
  std::vector<double> m1;        // m2 + V'(m2) / (a alpha) for each root
};

/// alpha + sum_{i=0}^{n-2} V^{(i+2)}(m2)/(i+1)! (V'(m2)/(a alpha))^i, with
/// n = deg V and a = a_1, built in exact rational arithmetic.
TwoSpeciesReduction two_species_reduction(const ModelSpec& spec);

/// Coefficients of the reduction as a polynomial in X = m2^2, monic.
/// Requires the reduction to be even.
Polynomial reduction_in_square(const Polynomial& even_poly);

enum class CubicKind { ThreeDistinctPositive, DoublePlusSimplePositive, OnePositiveTwoComplex, TriplePositive, Other };
std::string to_string(CubicKind kind);

struct CubicClassification {
  double p = 0.0, q = 0.0, r = 0.0;
  double delta = 0.0;
  CubicKind kind = CubicKind::Other;
};

double cubic_discriminant(double p, double q, double r);
/// x^3 + p x^2 + q x + r. Signs of Delta and the test p^2 = 3q are exact.
CubicClassification classify_cubic(double p, double q, double r);

/// B^2 - A B + (1/3 - 2 sqrt(1-A) / (3 sqrt 3)) < 0, with A = alpha,
/// B = a alpha, 0 < A < 1, 0 < B < 2/3.
bool three_root_region(double A, double B);
/// The degree-6 inequality in (A, B) evaluated as written.
double three_root_region_lhs(double A, double B);
bool three_root_region_direct(double A, double B);

enum class QuadraticKind { UniqueZero, InfiniteFamily };

struct QuadraticStationaryResult {
  QuadraticKind kind = QuadraticKind::UniqueZero;
  Eigen::VectorXd m1, m2;
  Eigen::MatrixXd precision1, precision2;
  Eigen::MatrixXd T;
  Eigen::MatrixXd null_basis_m1;  // columns; empty for UniqueZero
  Eigen::MatrixXd null_basis_m2;
};

struct QuadraticAlpha {
  Eigen::MatrixXd a11, a12, a21, a22;
};

QuadraticStationaryResult quadratic_stationary(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q, double a,
                                               const QuadraticAlpha& alpha, double sigma);

}  // namespace mskv
