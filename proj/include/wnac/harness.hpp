#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "wnac/chen.hpp"
#include "wnac/metrics.hpp"
#include "wnac/noise.hpp"
#include "wnac/sde.hpp"

namespace wnac {

struct ExperimentSpec {
  ClosedLoopSpec closed_loop;
  TimeGrid grid{0.0, 100.0, 1e-4};
  Vector x0 = Eigen::Vector3d(2.0, 8.0, 10.0);
  std::vector<std::uint64_t> seeds{1};
  // Deviation window in seconds; nullopt end means the grid end.
  double window_start = 0.0;
  std::optional<double> window_end;
  // Cost window [t_c, t_end); nullopt end means the grid end.
  double cost_start = 0.0;
  std::optional<double> cost_end;
  CostConvention cost_convention = CostConvention::Integral;
  // Decay-rate fit starts at this fraction of the horizon.
  double decay_fit_fraction = 0.2;

  void validate() const;
  MetricWindow window() const;
};

struct ScenarioResult {
  Trajectory trajectory;
  double delta = 0.0;
  double psi = 0.0;
  double decay_rate = 0.0;
};

// noise -> closed loop -> Euler-Maruyama -> metrics for one seed.
ScenarioResult run_scenario(const ExperimentSpec& spec, std::uint64_t seed);

// Deviation only; skips the cost and decay fit.
double scenario_delta(const ExperimentSpec& spec, std::uint64_t seed, bool* diverged = nullptr);

struct SweepRow {
  CoherenceMode mode = CoherenceMode::Common;
  double sigma = 0.0;
  std::uint64_t seed = 0;
  double delta = 0.0;
  bool diverged = false;
};

struct SweepAggregate {
  CoherenceMode mode = CoherenceMode::Common;
  double sigma = 0.0;
  double mean_delta = 0.0;
  double std_delta = 0.0;  // sample standard deviation; 0 for a single seed
  double divergence_fraction = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // sorted by (mode, sigma, seed)
  std::vector<SweepAggregate> aggregates;
};

// Aggregates over all rows sharing (mode, sigma), sorted by (mode, sigma).
std::vector<SweepAggregate> aggregate_rows(const std::vector<SweepRow>& rows);

// Every (mode, sigma, seed) with sigma_c = (sigma, sigma, sigma). Runs are
// spread across `jobs` worker threads (0 = hardware concurrency).
SweepResult intensity_sweep(const ExperimentSpec& spec, const std::vector<CoherenceMode>& modes,
                            const std::vector<double>& sigma_grid,
                            const std::vector<std::uint64_t>& seeds, unsigned jobs = 1);

// Smallest sigma whose mean deviation is <= delta_threshold with no diverged
// seed; +inf if none.
double threshold_from_sweep(const SweepResult& result, CoherenceMode mode, double delta_threshold);

// fraction * mean deviation at the smallest swept sigma, taken over the
// `reference` mode. Ties the cutoff to the unaided plateau of the same run.
double relative_delta_threshold(const SweepResult& result, double fraction,
                                CoherenceMode reference = CoherenceMode::Common);

struct CostComparison {
  std::vector<double> psi_unaided;  // per seed
  std::vector<double> psi_aided;
  double mean_unaided = 0.0;
  double mean_aided = 0.0;
};

// Runs both specs on the same seeds. The specs must share grid and x0.
CostComparison cost_comparison(const ExperimentSpec& unaided, const ExperimentSpec& aided,
                               const std::vector<std::uint64_t>& seeds, unsigned jobs = 1);

}  // namespace wnac
