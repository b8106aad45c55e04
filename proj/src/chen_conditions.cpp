#include "wnac/chen_conditions.hpp"

#include <algorithm>
#include <cmath>

#include "wnac/rng.hpp"

namespace wnac {

Eigen::Matrix3d closed_loop_linear_part(const ChenParams& params, FeedbackVariant variant) {
  const auto& [a, b, c] = params;
  // k at the origin gives the constant k3; k2 is linear in x.
  const double k3 = feedback(variant, Eigen::Vector3d::Zero())[2];
  const double h = -feedback(variant, Eigen::Vector3d(1.0, 0.0, 0.0))[1];
  Eigen::Matrix3d feedback_linear;
  feedback_linear << -a * k3, 0.0, 0.0,
                     -c * h, -c * h, 0.0,
                     0.0, 0.0, -b * k3;
  return chen_matrices(params).A0 + feedback_linear;
}

Eigen::Vector3d closed_loop_nonlinear_part(const ChenParams& params, FeedbackVariant variant,
                                           const Eigen::Vector3d& x) {
  const ChenMatrices m = chen_matrices(params);
  return m.A0 * x + m.f0(x) + feedback_force(params, variant, x) -
         closed_loop_linear_part(params, variant) * x;
}

double sampled_lipschitz_constant(const ChenParams& params, FeedbackVariant variant, double theta,
                                  std::size_t samples, std::uint64_t seed) {
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw ValidationError("lipschitz bound: theta must be positive and finite");
  }
  NormalStream normal(seed, StreamDomain::Auxiliary, 0);
  Xoshiro256pp uniform(derive_stream_key(seed, StreamDomain::Auxiliary, 1));
  double best = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    Eigen::Vector3d dir(normal(), normal(), normal());
    const double len = dir.norm();
    if (len == 0.0) continue;
    const double radius = theta * std::cbrt(uniform.uniform_open_closed());
    const Eigen::Vector3d x = dir * (radius / len);
    best = std::max(best, closed_loop_nonlinear_part(params, variant, x).norm() / x.norm());
  }
  return best;
}

double estimate_theta(const ClosedLoopSpec& spec, const TimeGrid& grid, const Vector& x0,
                      std::uint64_t seed) {
  const SdeSystem sys = build_closed_loop(spec);
  NoiseIncrements inc = correlated_increments(spec.mode, grid, sys.l, sys.p, seed);
  const Trajectory traj =
      euler_maruyama(sys, x0, grid, std::move(inc.aiding), std::move(inc.disturbance), seed);
  if (traj.diverged()) throw ValidationError("estimate_theta: pilot run diverged");
  return 1.1 * traj.states.rowwise().norm().maxCoeff();
}

ConditionInputs chen_condition_inputs(const ChenParams& params, FeedbackVariant variant,
                                      double theta, std::size_t lipschitz_samples) {
  const double ell = sampled_lipschitz_constant(params, variant, theta, lipschitz_samples);
  ConditionInputs in;
  in.A = closed_loop_linear_part(params, variant);
  in.P = Matrix::Identity(3, 3);
  in.L = ell * ell * Matrix::Identity(3, 3);
  in.R = 0.75 * theta * Matrix::Identity(3, 3);
  in.linear_system = false;
  return in;
}

}  // namespace wnac
