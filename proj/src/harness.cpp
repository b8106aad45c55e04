#include "wnac/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <thread>

namespace wnac {

void ExperimentSpec::validate() const {
  closed_loop.validate();
  if (x0.size() != 3 || !x0.allFinite()) {
    throw ValidationError("experiment: x0 must be 3 finite values");
  }
  if (seeds.empty()) throw ValidationError("experiment: seeds must be nonempty");
  const double end = window_end.value_or(grid.tf());
  if (window_start < grid.t0() || end > grid.tf() + 0.5 * grid.dt() || end < window_start) {
    throw ValidationError("experiment: deviation window must lie inside the grid");
  }
  const double cend = cost_end.value_or(grid.tf());
  if (cost_start < grid.t0() || cend > grid.tf() + 0.5 * grid.dt() || !(cend > cost_start)) {
    throw ValidationError("experiment: cost window must lie inside the grid");
  }
  if (!(decay_fit_fraction >= 0.0 && decay_fit_fraction < 1.0)) {
    throw ValidationError("experiment: decay_fit_fraction must be in [0, 1)");
  }
}

MetricWindow ExperimentSpec::window() const {
  return MetricWindow::from_times(grid, window_start, window_end.value_or(grid.tf()));
}

namespace {

Trajectory simulate(const ExperimentSpec& spec, std::uint64_t seed) {
  spec.validate();
  const SdeSystem sys = build_closed_loop(spec.closed_loop);
  NoiseIncrements inc = correlated_increments(spec.closed_loop.mode, spec.grid, sys.l, sys.p, seed);
  return euler_maruyama(sys, spec.x0, spec.grid, std::move(inc.aiding),
                        std::move(inc.disturbance), seed);
}

// Runs task(i) for i in [0, count) on up to `jobs` threads; rethrows the
// first failure.
template <class Task>
void parallel_for(std::size_t count, unsigned jobs, Task&& task) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, count));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> workers;
    workers.reserve(jobs);
    for (unsigned w = 0; w < jobs; ++w) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            task(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = count;
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

ScenarioResult run_scenario(const ExperimentSpec& spec, std::uint64_t seed) {
  ScenarioResult result{simulate(spec, seed)};
  result.delta = deviation(result.trajectory, spec.window());
  result.psi = control_cost(result.trajectory, spec.closed_loop, spec.cost_start,
                            spec.cost_end.value_or(spec.grid.tf()), spec.cost_convention);
  const double t_fit = spec.grid.t0() + spec.decay_fit_fraction * spec.grid.horizon();
  result.decay_rate = decay_rate(result.trajectory, Matrix::Identity(3, 3), t_fit);
  return result;
}

double scenario_delta(const ExperimentSpec& spec, std::uint64_t seed, bool* diverged) {
  const Trajectory traj = simulate(spec, seed);
  if (diverged) *diverged = traj.diverged();
  return deviation(traj, spec.window());
}

std::vector<SweepAggregate> aggregate_rows(const std::vector<SweepRow>& rows) {
  std::map<std::pair<int, double>, std::vector<const SweepRow*>> groups;
  for (const auto& r : rows) groups[{static_cast<int>(r.mode), r.sigma}].push_back(&r);

  std::vector<SweepAggregate> out;
  out.reserve(groups.size());
  for (const auto& [key, members] : groups) {
    SweepAggregate agg;
    agg.mode = static_cast<CoherenceMode>(key.first);
    agg.sigma = key.second;
    double sum = 0.0;
    std::size_t diverged = 0;
    for (const SweepRow* r : members) {
      sum += r->delta;
      diverged += r->diverged ? 1 : 0;
    }
    const double count = static_cast<double>(members.size());
    agg.mean_delta = sum / count;
    if (members.size() > 1 && std::isfinite(agg.mean_delta)) {
      double ss = 0.0;
      for (const SweepRow* r : members) ss += (r->delta - agg.mean_delta) * (r->delta - agg.mean_delta);
      agg.std_delta = std::sqrt(ss / (count - 1.0));
    } else if (!std::isfinite(agg.mean_delta)) {
      agg.std_delta = std::numeric_limits<double>::quiet_NaN();
    }
    agg.divergence_fraction = static_cast<double>(diverged) / count;
    out.push_back(agg);
  }
  return out;
}

SweepResult intensity_sweep(const ExperimentSpec& spec, const std::vector<CoherenceMode>& modes,
                            const std::vector<double>& sigma_grid,
                            const std::vector<std::uint64_t>& seeds, unsigned jobs) {
  if (modes.empty() || sigma_grid.empty() || seeds.empty()) {
    throw ValidationError("intensity_sweep: modes, sigma grid and seeds must be nonempty");
  }
  for (double s : sigma_grid) {
    if (!std::isfinite(s) || s < 0.0) throw ValidationError("intensity_sweep: sigma must be >= 0");
  }
  spec.validate();

  std::vector<SweepRow> rows;
  rows.reserve(modes.size() * sigma_grid.size() * seeds.size());
  for (CoherenceMode m : modes) {
    for (double s : sigma_grid) {
      for (std::uint64_t seed : seeds) rows.push_back({m, s, seed, 0.0, false});
    }
  }

  parallel_for(rows.size(), jobs, [&](std::size_t i) {
    SweepRow& row = rows[i];
    ExperimentSpec run = spec;
    run.closed_loop.mode = row.mode;
    run.closed_loop.sigma_c = Eigen::Vector3d::Constant(row.sigma);
    row.delta = scenario_delta(run, row.seed, &row.diverged);
  });

  std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    return std::tie(a.mode, a.sigma, a.seed) < std::tie(b.mode, b.sigma, b.seed);
  });
  SweepResult result;
  result.aggregates = aggregate_rows(rows);
  result.rows = std::move(rows);
  return result;
}

double threshold_from_sweep(const SweepResult& result, CoherenceMode mode, double delta_threshold) {
  bool found_mode = false;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& agg : result.aggregates) {
    if (agg.mode != mode) continue;
    found_mode = true;
    if (agg.divergence_fraction == 0.0 && agg.mean_delta <= delta_threshold) {
      best = std::min(best, agg.sigma);
    }
  }
  if (!found_mode) {
    throw ValidationError("threshold_from_sweep: sweep has no rows for mode '" +
                          std::string(to_string(mode)) + "'");
  }
  return best;
}

double relative_delta_threshold(const SweepResult& result, double fraction,
                                CoherenceMode reference) {
  if (!(fraction > 0.0) || !std::isfinite(fraction)) {
    throw ValidationError("relative threshold: fraction must be positive and finite");
  }
  const SweepAggregate* base = nullptr;
  for (const auto& agg : result.aggregates) {
    if (agg.mode == reference && (base == nullptr || agg.sigma < base->sigma)) base = &agg;
  }
  if (base == nullptr) {
    throw ValidationError("relative threshold: sweep has no rows for mode '" +
                          std::string(to_string(reference)) + "'");
  }
  return fraction * base->mean_delta;
}

CostComparison cost_comparison(const ExperimentSpec& unaided, const ExperimentSpec& aided,
                               const std::vector<std::uint64_t>& seeds, unsigned jobs) {
  if (seeds.empty()) throw ValidationError("cost_comparison: seeds must be nonempty");
  if (!(unaided.grid == aided.grid) || unaided.x0 != aided.x0) {
    throw ValidationError("cost_comparison: both scenarios must share grid and x0");
  }
  CostComparison out;
  out.psi_unaided.assign(seeds.size(), 0.0);
  out.psi_aided.assign(seeds.size(), 0.0);
  parallel_for(2 * seeds.size(), jobs, [&](std::size_t i) {
    const std::size_t s = i / 2;
    if (i % 2 == 0) {
      out.psi_unaided[s] = run_scenario(unaided, seeds[s]).psi;
    } else {
      out.psi_aided[s] = run_scenario(aided, seeds[s]).psi;
    }
  });
  const double n = static_cast<double>(seeds.size());
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    out.mean_unaided += out.psi_unaided[s] / n;
    out.mean_aided += out.psi_aided[s] / n;
  }
  return out;
}

}  // namespace wnac
