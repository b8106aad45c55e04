#include "wnac/noise.hpp"

#include <cmath>

#include "wnac/rng.hpp"

namespace wnac {

std::string_view to_string(CoherenceMode mode) {
  switch (mode) {
    case CoherenceMode::TotallySymmetric: return "totally_symmetric";
    case CoherenceMode::Common: return "common";
    case CoherenceMode::Independent: return "independent";
    case CoherenceMode::Asymmetric: return "asymmetric";
  }
  return "unknown";
}

CoherenceMode parse_coherence_mode(std::string_view name) {
  if (name == "totally_symmetric") return CoherenceMode::TotallySymmetric;
  if (name == "common") return CoherenceMode::Common;
  if (name == "independent") return CoherenceMode::Independent;
  if (name == "asymmetric") return CoherenceMode::Asymmetric;
  throw ValidationError("unknown coherence mode '" + std::string(name) +
                        "' (expected totally_symmetric, common, independent or asymmetric)");
}

namespace {

Vector stream_column(const TimeGrid& grid, std::uint64_t seed, StreamDomain domain,
                     std::uint64_t channel) {
  const auto steps = static_cast<Eigen::Index>(grid.n_steps());
  Vector col(steps);
  NormalStream stream(seed, domain, channel);
  const double scale = std::sqrt(grid.dt());
  for (Eigen::Index k = 0; k < steps; ++k) col[k] = scale * stream();
  return col;
}

}  // namespace

NoiseIncrements correlated_increments(CoherenceMode mode, const TimeGrid& grid, std::size_t l,
                                      std::size_t p, std::uint64_t seed) {
  if (mode == CoherenceMode::Asymmetric && l != 3) {
    throw ValidationError("asymmetric coherence needs exactly 3 aiding channels, got " +
                          std::to_string(l));
  }
  const auto steps = static_cast<Eigen::Index>(grid.n_steps());
  NoiseIncrements out{RowMatrix(steps, static_cast<Eigen::Index>(l)),
                      RowMatrix(steps, static_cast<Eigen::Index>(p))};

  const bool shared_aiding = mode != CoherenceMode::Independent;
  Vector base;
  if (shared_aiding && (l > 0 || (mode == CoherenceMode::TotallySymmetric && p > 0))) {
    base = stream_column(grid, seed, StreamDomain::Aiding, 0);
  }

  for (std::size_t i = 0; i < l; ++i) {
    const auto col = static_cast<Eigen::Index>(i);
    switch (mode) {
      case CoherenceMode::TotallySymmetric:
      case CoherenceMode::Common:
        out.aiding.col(col) = base;
        break;
      case CoherenceMode::Asymmetric:
        if (i == 0) {
          out.aiding.col(col) = base;
        } else {
          out.aiding.col(col) = -base;
        }
        break;
      case CoherenceMode::Independent:
        out.aiding.col(col) = stream_column(grid, seed, StreamDomain::Aiding, i);
        break;
    }
  }

  for (std::size_t j = 0; j < p; ++j) {
    const auto col = static_cast<Eigen::Index>(j);
    if (mode == CoherenceMode::TotallySymmetric) {
      out.disturbance.col(col) = base;
    } else {
      out.disturbance.col(col) = stream_column(grid, seed, StreamDomain::Disturbance, j);
    }
  }
  return out;
}

void DisturbanceSpec::validate() const {
  if (sin_amplitudes.size() != white_intensities.size()) {
    throw ValidationError("disturbance: amplitudes and intensities differ in length");
  }
  if (!sin_amplitudes.allFinite() || !white_intensities.allFinite()) {
    throw ValidationError("disturbance: entries must be finite");
  }
  if ((white_intensities.array() < 0.0).any()) {
    throw ValidationError("disturbance: white-noise intensities must be nonnegative");
  }
}

DisturbanceSpec DisturbanceSpec::reference() {
  return {Eigen::Vector3d(1.0, 2.0, 0.5), Eigen::Vector3d(0.5, 0.25, 1.0)};
}

DisturbanceSpec DisturbanceSpec::none(std::size_t p) {
  const auto size = static_cast<Eigen::Index>(p);
  return {Vector::Zero(size), Vector::Zero(size)};
}

Vector disturbance_value(const DisturbanceSpec& spec, double t, const Vector& white_sample) {
  spec.validate();
  if (white_sample.size() != spec.sin_amplitudes.size()) {
    throw ValidationError("disturbance: white sample has the wrong length");
  }
  return spec.sin_amplitudes * std::sin(t) + spec.white_intensities.cwiseProduct(white_sample);
}

}  // namespace wnac
