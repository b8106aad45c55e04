#pragma once

#include <cstddef>
#include <string_view>

#include "wnac/chen.hpp"
#include "wnac/common.hpp"
#include "wnac/sde.hpp"

namespace wnac {

// Inclusive state-index window [start, end] over which deviation is averaged.
struct MetricWindow {
  std::size_t start = 0;
  std::size_t end = 0;

  // Window covering [t_start, t_end] of the grid.
  static MetricWindow from_times(const TimeGrid& grid, double t_start, double t_end);
};

// Mean of |x_i|^2 over the window. +inf if the run diverged at or before
// window.end.
double deviation(const Trajectory& traj, const MetricWindow& window);

// How the cost integral is discretized on the grid.
//   Integral: sum_k (|G k|^2 + |C sigma dB_k / dt|^2) dt / (t_end - t_c)
//   StepSum:  sum_k (|G k|^2 + |C sigma dB_k / sqrt(dt)|^2) / (t_end - t_c)
// Integral is the Riemann sum of the continuous definition; its noise term
// grows like 1/dt. StepSum accumulates per-step values with a unit-variance
// white sample and no dt weight; it equals Integral / dt for the feedback
// term and matches the magnitude of the reference cost values.
enum class CostConvention { Integral, StepSum };

std::string_view to_string(CostConvention c);
CostConvention parse_cost_convention(std::string_view name);

// Time-averaged squared magnitude of feedback and injected aiding noise over
// steps t_k in [t_c, t_end). Uses the trajectory's recorded increments.
double control_cost(const Trajectory& traj, const ClosedLoopSpec& spec, double t_c, double t_end,
                    CostConvention convention = CostConvention::Integral);

// Least-squares slope of log |P^{1/2} x(t)| against t over t >= t_min.
// -inf if a state is exactly zero there; +inf if the run diverged.
double decay_rate(const Trajectory& traj, const Matrix& P, double t_min);

}  // namespace wnac
