#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wnac/common.hpp"

namespace wnac {

// One white-noise channel in the sufficient condition: intensity sigma and the
// bounds x'P C_i(x) >= x'J x, C_i(x)'P C_i(x) <= x'K x, alpha the smallest
// eigenvalue of C_i.
struct NoiseChannelBound {
  double sigma = 0.0;
  Matrix K;
  Matrix J;
  double alpha = 0.0;
};

struct ConditionInputs {
  Matrix A;
  Matrix P;  // symmetric positive definite
  Matrix L;  // f'f <= x'L x
  Matrix R;  // rho(|x|) |x'P D(x)| <= x'R x
  std::optional<double> epsilon;  // nullopt selects epsilon automatically
  std::vector<NoiseChannelBound> aiding;
  std::vector<NoiseChannelBound> disturbance;
  // Linear plant: the eps P^2 + L / eps term is dropped.
  bool linear_system = false;

  std::size_t dimension() const { return static_cast<std::size_t>(A.rows()); }

  // Shapes, symmetry and definiteness of every matrix.
  void validate() const;
};

struct ConditionReport {
  Matrix Q;
  Vector spectrum;  // ascending eigenvalues of Q
  double lambda_min_Q = 0.0;
  bool passes = false;
  double epsilon_used = 0.0;  // 0 when the eps term is absent
  double decay_bound = 0.0;   // lambda_min(Q) / (2 beta_max(P))
  double asymmetry = 0.0;     // max |Q - Q'| before symmetrization
};

// sqrt(r s), r and s the largest eigenvalues of the PSD matrices R and S.
double lemma4_scale(const Matrix& R, const Matrix& S);

// Q = -[A'P + PA + eps P^2 + L/eps + 2R + sum sigma^2 K
//       - (2 / beta_max) sum sigma^2 alpha J]
// over both aiding and disturbance channels.
ConditionReport q_theorem1(const ConditionInputs& inputs);

// Aiding channels only; throws if any disturbance channel is present.
ConditionReport q_theorem2(const ConditionInputs& inputs);

// Multiplicative aiding channels C_i(x) = c_i x with intensities sigma_c.
// `base.aiding` must be empty. Requires 2 beta_min > beta_max.
ConditionReport q_corollary(const ConditionInputs& base, std::span<const double> c,
                            std::span<const double> sigma_c);

// The generic inputs equivalent to q_corollary: K_i = c_i^2 P, J_i = c_i P and
// alpha_i = c_i beta_min, so that q_theorem1 of the result equals q_corollary.
ConditionInputs corollary_substitution(const ConditionInputs& base, std::span<const double> c,
                                       std::span<const double> sigma_c);

// Smallest common intensity sigma* (to `tol`) such that q_corollary passes for
// every sigma > sigma*. Bisects on sigma^2; 0 when already passing at sigma = 0.
double min_aiding_intensity(const ConditionInputs& base, std::span<const double> c,
                            double tol = 1e-10);

// Pointwise check of the matrix bounds at sample states.
struct BoundCheckInputs {
  using MatrixFn = std::function<Matrix(const Vector&)>;
  using ColumnFn = std::function<Vector(const Vector&)>;
  using MarginFn = std::function<double(const Vector&)>;

  Matrix P;
  MarginFn rho;
  // Optional disturbance matrix D(x) (n x p) with R and per-column J/K bounds.
  MatrixFn disturbance_matrix;
  std::optional<Matrix> R;
  std::vector<std::pair<Matrix, Matrix>> disturbance_bounds;  // (J_j, K_j)
  // Aiding columns C_i(x) with their (J_i, K_i).
  std::vector<ColumnFn> aiding_columns;
  std::vector<std::pair<Matrix, Matrix>> aiding_bounds;
};

struct BoundSlack {
  std::string condition;  // "margin", "disturbance_lower", ...
  double worst_slack = 0.0;
  Vector worst_point;
};

struct BoundCheckReport {
  std::vector<BoundSlack> slacks;
  double worst_slack = 0.0;
  bool holds = true;
};

// Slack is rhs - lhs of each inequality in the "holds" direction, so
// negative values are violations. Violations are reported, not thrown.
BoundCheckReport verify_condition_bounds(const BoundCheckInputs& inputs,
                                         const std::vector<Vector>& sample_points);

}  // namespace wnac
