#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "wnac/common.hpp"
#include "wnac/time_grid.hpp"

namespace wnac {

// Correlation structure among the aiding and disturbance Wiener channels.
enum class CoherenceMode {
  TotallySymmetric,  // one stream broadcast to every aiding and disturbance column
  Common,            // one stream for all aiding columns; independent disturbance
  Independent,       // l + p independent streams
  Asymmetric,        // aiding columns (w, -w, -w); requires l == 3
};

std::string_view to_string(CoherenceMode mode);
CoherenceMode parse_coherence_mode(std::string_view name);

struct NoiseIncrements {
  RowMatrix aiding;       // n_steps x l
  RowMatrix disturbance;  // n_steps x p
};

// Aiding column i draws from substream (Aiding, i) and disturbance column j
// from (Disturbance, j); shared modes reuse (Aiding, 0) as the base stream.
// Column 0 of the aiding block is therefore identical across modes.
NoiseIncrements correlated_increments(CoherenceMode mode, const TimeGrid& grid, std::size_t l,
                                      std::size_t p, std::uint64_t seed);

// Disturbance w_j(t) = amplitude_j sin(t) + intensity_j * white_j.
struct DisturbanceSpec {
  Vector sin_amplitudes;
  Vector white_intensities;

  std::size_t channels() const { return static_cast<std::size_t>(sin_amplitudes.size()); }
  void validate() const;

  // Reference disturbance: (1, 2, 0.5) sin(t) plus white noise of intensities (0.5, 0.25, 1).
  static DisturbanceSpec reference();
  static DisturbanceSpec none(std::size_t p);
};

// white_sample[j] is the discrete white-noise value dB_j / dt of the step.
Vector disturbance_value(const DisturbanceSpec& spec, double t, const Vector& white_sample);

}  // namespace wnac
