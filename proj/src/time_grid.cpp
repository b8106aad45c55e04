#include "wnac/time_grid.hpp"

#include <cmath>
#include <string>

#include "wnac/common.hpp"

namespace wnac {

TimeGrid::TimeGrid(double t0, double tf, double dt) : t0_(t0), tf_(tf), dt_(dt), n_steps_(0) {
  if (!std::isfinite(t0) || !std::isfinite(tf) || !std::isfinite(dt)) {
    throw ValidationError("time grid: t0, tf and dt must be finite");
  }
  if (!(dt > 0.0)) throw ValidationError("time grid: dt must be positive");
  if (!(tf > t0)) throw ValidationError("time grid: tf must exceed t0");
  const double steps = std::round((tf - t0) / dt);
  if (steps < 1.0) {
    throw ValidationError("time grid: fewer than one step (tf - t0 = " + std::to_string(tf - t0) +
                          ", dt = " + std::to_string(dt) + ")");
  }
  n_steps_ = static_cast<std::size_t>(steps);
}

std::size_t TimeGrid::index_of(double t) const {
  const double k = std::round((t - t0_) / dt_);
  if (k <= 0.0) return 0;
  if (k >= static_cast<double>(n_steps_)) return n_steps_;
  return static_cast<std::size_t>(k);
}

}  // namespace wnac
