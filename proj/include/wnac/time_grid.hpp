#pragma once

#include <cstddef>

namespace wnac {

// Uniform time discretization t_k = t0 + k*dt, k = 0..n_steps.
class TimeGrid {
 public:
  TimeGrid(double t0, double tf, double dt);

  double t0() const { return t0_; }
  double tf() const { return tf_; }
  double dt() const { return dt_; }
  std::size_t n_steps() const { return n_steps_; }
  double horizon() const { return tf_ - t0_; }

  double time(std::size_t k) const { return t0_ + static_cast<double>(k) * dt_; }

  // Nearest grid index to t, clamped to [0, n_steps].
  std::size_t index_of(double t) const;

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

 private:
  double t0_;
  double tf_;
  double dt_;
  std::size_t n_steps_;
};

}  // namespace wnac
