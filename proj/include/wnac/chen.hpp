#pragma once

#include <cstdint>
#include <string_view>

#include "wnac/common.hpp"
#include "wnac/noise.hpp"
#include "wnac/sde.hpp"

namespace wnac {

struct ChenParams {
  double a = 35.0;
  double b = 3.0;
  double c = 28.0;
};

enum class FeedbackVariant {
  Full31,    // (-1.5 rho, -(x1 + x2), -1), the CLF-cancelling law
  Weak32,    // (-1.4 rho, -0.9 (x1 + x2), -1)
  Weaker34,  // (-rho, -0.5 (x1 + x2), -1)
  Zero,
};

// Sign with which w1 and w2 perturb the parameters a and b.
//   Plus:  (a + w1), (b + w2)  -- the closed-loop model that is simulated
//   Minus: (a - w1), (b - w2)  -- the open-loop model as first written
enum class PerturbationSign { Plus, Minus };

// Compositional A0 x + f0 + G k + D w, or the pre-expanded Weak32 closed loop
// whose third row carries +0.933 rho x3.
enum class DriftForm { Compositional, Expanded33 };

std::string_view to_string(FeedbackVariant v);
FeedbackVariant parse_feedback_variant(std::string_view name);
std::string_view to_string(PerturbationSign s);
PerturbationSign parse_perturbation_sign(std::string_view name);
std::string_view to_string(DriftForm f);
DriftForm parse_drift_form(std::string_view name);

struct ClosedLoopSpec {
  ChenParams params;
  FeedbackVariant variant = FeedbackVariant::Zero;
  Eigen::Vector3d sigma_c = Eigen::Vector3d::Zero();
  DisturbanceSpec disturbance = DisturbanceSpec::none(3);
  CoherenceMode mode = CoherenceMode::Common;
  PerturbationSign sign = PerturbationSign::Plus;
  DriftForm form = DriftForm::Compositional;

  void validate() const;
};

// Chen system pieces: x' = A0 x + f0(x) + G(x) k(x) + C(x) sigma_c B_c' + D0(x) w.
struct ChenMatrices {
  ChenParams params;
  Eigen::Matrix3d A0;

  Eigen::Vector3d f0(const Eigen::Vector3d& x) const;
  Eigen::Matrix3d D0(const Eigen::Vector3d& x) const;
  Eigen::Matrix3d G(const Eigen::Vector3d& x) const;
  Eigen::Matrix3d C(const Eigen::Vector3d& x) const;
};

ChenMatrices chen_matrices(const ChenParams& params);

// Disturbance input matrix under the chosen perturbation sign. Minus returns
// D0(x); Plus negates the w1 and w2 columns.
Eigen::Matrix3d disturbance_matrix(PerturbationSign sign, const Eigen::Vector3d& x);

// Stability margin rho(|x|) = 0.5 |x|.
double rho(const Eigen::Ref<const Vector>& x);

Eigen::Vector3d feedback(FeedbackVariant variant, const Eigen::Vector3d& x);

// Applied feedback force G(x) k(x).
Eigen::Vector3d feedback_force(const ChenParams& params, FeedbackVariant variant,
                               const Eigen::Vector3d& x);

// Deterministic drift of the closed loop at (x, w).
Eigen::Vector3d closed_loop_drift(const ClosedLoopSpec& spec, const Eigen::Vector3d& x,
                                  const Eigen::Vector3d& omega);

// Pre-expanded Weak32 drift, literal coefficients included (row 3: +0.933 rho x3).
Eigen::Vector3d expanded_weak32_drift(const ChenParams& params, const Eigen::Vector3d& x,
                                      const Eigen::Vector3d& omega);

SdeSystem build_closed_loop(const ClosedLoopSpec& spec);

// Upper bound on V'(x) for V = |x|^2 / 2 with |w| <= rho(|x|):
//   -a x1^2 - b x3^2 + c x2 (x1 + x2) + (k1 - a k3) x1^2 + k1 x2^2 + c k2 x2
//   + (2/3 k1 - b k3) x3^2 + rho (1.5 x1^2 + 1.5 x2^2 + x3^2)
double clf_bound(const ChenParams& params, FeedbackVariant variant, const Eigen::Vector3d& x);

}  // namespace wnac
