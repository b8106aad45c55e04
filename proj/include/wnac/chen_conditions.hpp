#pragma once

#include <cstddef>
#include <cstdint>

#include "wnac/chen.hpp"
#include "wnac/conditions.hpp"
#include "wnac/time_grid.hpp"

namespace wnac {

// Linear part of A0 x + G(x) k(x) for feedback (-g rho, -h (x1 + x2), -1).
Eigen::Matrix3d closed_loop_linear_part(const ChenParams& params, FeedbackVariant variant);

// Remaining nonlinear part f(x) = f0(x) + G(x) k(x) - (linear part) x.
Eigen::Vector3d closed_loop_nonlinear_part(const ChenParams& params, FeedbackVariant variant,
                                           const Eigen::Vector3d& x);

// sup |f(x)| / |x| over `samples` uniform points of the ball |x| <= theta.
double sampled_lipschitz_constant(const ChenParams& params, FeedbackVariant variant, double theta,
                                  std::size_t samples = 100000, std::uint64_t seed = 0);

// 1.1 * max |x| over a pilot run of the scenario.
double estimate_theta(const ClosedLoopSpec& spec, const TimeGrid& grid, const Vector& x0,
                      std::uint64_t seed);

// Aiding-only inputs with P = I, R = 0.75 theta I and L = l^2 I.
ConditionInputs chen_condition_inputs(const ChenParams& params, FeedbackVariant variant,
                                      double theta, std::size_t lipschitz_samples = 100000);

}  // namespace wnac
