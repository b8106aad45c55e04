#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>

#include "wnac/common.hpp"
#include "wnac/time_grid.hpp"

namespace wnac {

// Entries beyond this magnitude mark the run as diverged.
inline constexpr double kOverflowGuard = 1e12;

// Controlled Ito SDE
//
//   dx = drift(t, x, w(t)) dt + C(x) sigma_c dB_c + D(x) sigma_d dB_d
//
// with n states, l aiding channels and p disturbance channels. The diffusion
// callables return the intensity-scaled matrices C(x) sigma_c (n x l) and
// D(x) sigma_d (n x p); w(t) is the deterministic part of the disturbance.
struct SdeSystem {
  using DriftFn = std::function<void(double t, const Vector& x, const Vector& omega,
                                     Eigen::Ref<Vector> out)>;
  using DiffusionFn = std::function<void(const Vector& x, Eigen::Ref<Matrix> out)>;
  using DisturbanceFn = std::function<void(double t, Eigen::Ref<Vector> out)>;

  std::size_t n = 0;
  std::size_t l = 0;
  std::size_t p = 0;
  DriftFn drift;
  DiffusionFn aiding_diffusion;
  DiffusionFn disturbance_diffusion;
  DisturbanceFn deterministic_disturbance;

  // Throws ValidationError if a callable is missing or n == 0.
  void validate() const;
};

struct Trajectory {
  TimeGrid grid;
  // (steps_taken + 1) x n. Row 0 is the initial state.
  RowMatrix states;
  // steps_taken x l and steps_taken x p; exactly the increments consumed.
  RowMatrix aiding_increments;
  RowMatrix disturbance_increments;
  std::uint64_t seed = 0;
  // Index of the first state row that is non-finite or beyond kOverflowGuard.
  // Integration stops there, so states has diverged_at + 1 rows.
  std::optional<std::size_t> diverged_at;

  std::size_t dimension() const { return static_cast<std::size_t>(states.cols()); }
  std::size_t steps_taken() const { return static_cast<std::size_t>(states.rows()) - 1; }
  bool diverged() const { return diverged_at.has_value(); }
  Vector state(std::size_t k) const { return states.row(static_cast<Eigen::Index>(k)).transpose(); }
};

// Independent N(0, dt) increments, one aiding-domain substream per column.
RowMatrix wiener_increments(const TimeGrid& grid, std::size_t dims, std::uint64_t seed);

// Fixed-step Euler-Maruyama with left-endpoint evaluation:
//
//   x_{k+1} = x_k + drift(t_k, x_k, w(t_k)) dt + C(x_k) dB_c[k] + D(x_k) dB_d[k]
//
// The increment matrices are moved into the returned trajectory (truncated to
// the consumed rows if the run diverges).
Trajectory euler_maruyama(const SdeSystem& system, const Vector& x0, const TimeGrid& grid,
                          RowMatrix aiding_increments, RowMatrix disturbance_increments,
                          std::uint64_t seed = 0);

}  // namespace wnac
