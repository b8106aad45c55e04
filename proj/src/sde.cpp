#include "wnac/sde.hpp"

#include <cmath>
#include <string>

#include "wnac/rng.hpp"

namespace wnac {

void SdeSystem::validate() const {
  if (n == 0) throw ValidationError("sde system: state dimension must be positive");
  if (!drift) throw ValidationError("sde system: drift is not set");
  if (l > 0 && !aiding_diffusion) throw ValidationError("sde system: aiding diffusion is not set");
  if (p > 0 && !disturbance_diffusion) {
    throw ValidationError("sde system: disturbance diffusion is not set");
  }
}

RowMatrix wiener_increments(const TimeGrid& grid, std::size_t dims, std::uint64_t seed) {
  const auto steps = static_cast<Eigen::Index>(grid.n_steps());
  RowMatrix out(steps, static_cast<Eigen::Index>(dims));
  const double scale = std::sqrt(grid.dt());
  for (std::size_t j = 0; j < dims; ++j) {
    NormalStream stream(seed, StreamDomain::Aiding, j);
    const auto col = static_cast<Eigen::Index>(j);
    for (Eigen::Index k = 0; k < steps; ++k) out(k, col) = scale * stream();
  }
  return out;
}

namespace {

bool out_of_range(const Eigen::Ref<const Vector>& x) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double v = x[i];
    if (!std::isfinite(v) || std::abs(v) > kOverflowGuard) return true;
  }
  return false;
}

std::string shape(Eigen::Index r, Eigen::Index c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

}  // namespace

Trajectory euler_maruyama(const SdeSystem& system, const Vector& x0, const TimeGrid& grid,
                          RowMatrix aiding_increments, RowMatrix disturbance_increments,
                          std::uint64_t seed) {
  system.validate();
  const auto n = static_cast<Eigen::Index>(system.n);
  const auto l = static_cast<Eigen::Index>(system.l);
  const auto p = static_cast<Eigen::Index>(system.p);
  const auto steps = static_cast<Eigen::Index>(grid.n_steps());

  if (x0.size() != n) {
    throw ValidationError("euler_maruyama: initial state has " + std::to_string(x0.size()) +
                          " entries, system has n = " + std::to_string(n));
  }
  if (aiding_increments.rows() != steps || aiding_increments.cols() != l) {
    throw ValidationError("euler_maruyama: aiding increments are " +
                          shape(aiding_increments.rows(), aiding_increments.cols()) +
                          ", expected " + shape(steps, l));
  }
  if (disturbance_increments.rows() != steps || disturbance_increments.cols() != p) {
    throw ValidationError("euler_maruyama: disturbance increments are " +
                          shape(disturbance_increments.rows(), disturbance_increments.cols()) +
                          ", expected " + shape(steps, p));
  }
  if (!x0.allFinite()) throw ValidationError("euler_maruyama: initial state is not finite");

  Trajectory traj{grid, RowMatrix(steps + 1, n), {}, {}, seed, std::nullopt};
  traj.states.row(0) = x0.transpose();

  const double dt = grid.dt();
  Vector x = x0;
  Vector next(n);
  Vector drift(n);
  Vector omega = Vector::Zero(p);
  Matrix aid(n, l);
  Matrix dis(n, p);

  Eigen::Index taken = steps;
  for (Eigen::Index k = 0; k < steps; ++k) {
    const double t = grid.time(static_cast<std::size_t>(k));
    if (system.deterministic_disturbance && p > 0) system.deterministic_disturbance(t, omega);
    system.drift(t, x, omega, drift);
    next = x + dt * drift;
    if (l > 0) {
      system.aiding_diffusion(x, aid);
      next.noalias() += aid * aiding_increments.row(k).transpose();
    }
    if (p > 0) {
      system.disturbance_diffusion(x, dis);
      next.noalias() += dis * disturbance_increments.row(k).transpose();
    }
    x.swap(next);
    traj.states.row(k + 1) = x.transpose();
    if (out_of_range(x)) {
      taken = k + 1;
      traj.diverged_at = static_cast<std::size_t>(k + 1);
      break;
    }
  }

  if (taken < steps) {
    traj.states.conservativeResize(taken + 1, n);
    aiding_increments.conservativeResize(taken, l);
    disturbance_increments.conservativeResize(taken, p);
  }
  traj.aiding_increments = std::move(aiding_increments);
  traj.disturbance_increments = std::move(disturbance_increments);
  return traj;
}

}  // namespace wnac
