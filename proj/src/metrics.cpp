#include "wnac/metrics.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace wnac {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

MetricWindow MetricWindow::from_times(const TimeGrid& grid, double t_start, double t_end) {
  if (t_end < t_start) throw ValidationError("metric window: t_end precedes t_start");
  return {grid.index_of(t_start), grid.index_of(t_end)};
}

double deviation(const Trajectory& traj, const MetricWindow& window) {
  if (window.start > window.end) {
    throw ValidationError("deviation: empty window [" + std::to_string(window.start) + ", " +
                          std::to_string(window.end) + "]");
  }
  if (window.end > traj.grid.n_steps()) {
    throw ValidationError("deviation: window end " + std::to_string(window.end) +
                          " is beyond the grid (" + std::to_string(traj.grid.n_steps()) +
                          " steps)");
  }
  if (traj.diverged_at && *traj.diverged_at <= window.end) return kInf;
  if (window.end > traj.steps_taken()) {
    throw ValidationError("deviation: window extends past the recorded states");
  }
  double sum = 0.0;
  for (std::size_t i = window.start; i <= window.end; ++i) {
    sum += traj.states.row(static_cast<Eigen::Index>(i)).squaredNorm();
  }
  return sum / static_cast<double>(window.end - window.start + 1);
}

std::string_view to_string(CostConvention c) {
  return c == CostConvention::Integral ? "integral" : "step_sum";
}

CostConvention parse_cost_convention(std::string_view name) {
  if (name == "integral") return CostConvention::Integral;
  if (name == "step_sum") return CostConvention::StepSum;
  throw ValidationError("unknown cost convention '" + std::string(name) +
                        "' (expected integral or step_sum)");
}

double control_cost(const Trajectory& traj, const ClosedLoopSpec& spec, double t_c, double t_end,
                    CostConvention convention) {
  if (traj.dimension() != 3) throw ValidationError("control_cost: expects a Chen trajectory");
  if (!(t_end > t_c)) throw ValidationError("control_cost: t_end must exceed t_c");
  const TimeGrid& grid = traj.grid;
  if (t_c < grid.t0() - 0.5 * grid.dt() || t_end > grid.tf() + 0.5 * grid.dt()) {
    throw ValidationError("control_cost: [t_c, t_end] lies outside the trajectory");
  }
  const std::size_t k0 = grid.index_of(t_c);
  const std::size_t k1 = grid.index_of(t_end);
  if (k1 <= k0) throw ValidationError("control_cost: window shorter than one step");
  if (traj.diverged_at && *traj.diverged_at <= k1) return kInf;

  const bool noisy = (spec.sigma_c.array() != 0.0).any();
  if (noisy && static_cast<std::size_t>(traj.aiding_increments.rows()) < k1) {
    throw ValidationError("control_cost: trajectory lacks recorded aiding increments");
  }
  if (noisy && traj.aiding_increments.cols() != 3) {
    throw ValidationError("control_cost: expected 3 recorded aiding channels");
  }

  const double dt = grid.dt();
  double feedback_sum = 0.0;
  double noise_sum = 0.0;
  for (std::size_t k = k0; k < k1; ++k) {
    const auto row = static_cast<Eigen::Index>(k);
    const Eigen::Vector3d x = traj.states.row(row).transpose();
    feedback_sum += feedback_force(spec.params, spec.variant, x).squaredNorm();
    if (noisy) {
      for (Eigen::Index i = 0; i < 3; ++i) {
        const double v = x[i] * spec.sigma_c[i] * traj.aiding_increments(row, i);
        noise_sum += v * v;
      }
    }
  }
  // Both conventions share the noise term sum |C sigma dB|^2 / dt.
  const double duration = static_cast<double>(k1 - k0) * dt;
  const double feedback_weight = convention == CostConvention::Integral ? dt : 1.0;
  return (feedback_weight * feedback_sum + noise_sum / dt) / duration;
}

double decay_rate(const Trajectory& traj, const Matrix& P, double t_min) {
  const auto n = static_cast<Eigen::Index>(traj.dimension());
  if (P.rows() != n || P.cols() != n) throw ValidationError("decay_rate: P has the wrong shape");
  if ((P - P.transpose()).cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, P.cwiseAbs().maxCoeff())) {
    throw ValidationError("decay_rate: P must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(P, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() <= 0.0) throw ValidationError("decay_rate: P must be PD");
  if (traj.diverged()) return kInf;

  const std::size_t k0 = traj.grid.index_of(t_min);
  const std::size_t k1 = traj.steps_taken();
  if (k1 <= k0) throw ValidationError("decay_rate: fewer than two samples after t_min");

  const double count = static_cast<double>(k1 - k0 + 1);
  double t_mean = 0.0, y_mean = 0.0;
  Vector y(static_cast<Eigen::Index>(k1 - k0 + 1));
  for (std::size_t k = k0; k <= k1; ++k) {
    const Vector x = traj.state(k);
    const double energy = x.dot(P * x);
    if (energy == 0.0) return -kInf;
    const double v = 0.5 * std::log(energy);
    y[static_cast<Eigen::Index>(k - k0)] = v;
    y_mean += v;
    t_mean += traj.grid.time(k);
  }
  t_mean /= count;
  y_mean /= count;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = k0; k <= k1; ++k) {
    const double dt = traj.grid.time(k) - t_mean;
    sxy += dt * (y[static_cast<Eigen::Index>(k - k0)] - y_mean);
    sxx += dt * dt;
  }
  return sxy / sxx;
}

}  // namespace wnac
