#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "wnac/harness.hpp"
#include "wnac/io.hpp"

namespace wnac {
namespace {

namespace fs = std::filesystem;

ExperimentSpec short_spec() {
  ExperimentSpec spec;
  spec.closed_loop.variant = FeedbackVariant::Weak32;
  spec.closed_loop.disturbance = DisturbanceSpec::reference();
  spec.grid = TimeGrid(0.0, 2.0, 1e-3);
  spec.window_start = 1.0;
  return spec;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "wnac_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(Scenario, RunIsAPureFunctionOfSeed) {
  ExperimentSpec spec = short_spec();
  spec.closed_loop.sigma_c = Eigen::Vector3d::Constant(1.0);
  const ScenarioResult a = run_scenario(spec, 3);
  const ScenarioResult b = run_scenario(spec, 3);
  EXPECT_EQ(a.trajectory.states, b.trajectory.states);
  EXPECT_EQ(a.delta, b.delta);
  EXPECT_EQ(a.psi, b.psi);
  EXPECT_NE(a.delta, run_scenario(spec, 4).delta);
  bool diverged = true;
  EXPECT_EQ(scenario_delta(spec, 3, &diverged), a.delta);
  EXPECT_FALSE(diverged);
}

TEST(Scenario, ValidationRejectsBadWindows) {
  ExperimentSpec spec = short_spec();
  spec.window_start = 3.0;
  EXPECT_THROW(run_scenario(spec, 1), ValidationError);
  spec = short_spec();
  spec.x0 = Eigen::Vector2d(1, 1);
  EXPECT_THROW(run_scenario(spec, 1), ValidationError);
}

TEST(Sweep, ShapeAndOrdering) {
  const std::vector<CoherenceMode> modes{CoherenceMode::Independent, CoherenceMode::Common};
  const SweepResult r = intensity_sweep(short_spec(), modes, {0.0, 1.0}, {2, 1}, 1);
  ASSERT_EQ(r.rows.size(), 8u);
  ASSERT_EQ(r.aggregates.size(), 4u);
  EXPECT_EQ(r.rows.front().mode, CoherenceMode::Common);
  EXPECT_EQ(r.rows.front().seed, 1u);
  EXPECT_EQ(r.rows.back().mode, CoherenceMode::Independent);
  EXPECT_EQ(r.rows.back().sigma, 1.0);
}

TEST(Sweep, ParallelMatchesSerial) {
  const std::vector<CoherenceMode> modes{CoherenceMode::Common, CoherenceMode::Asymmetric};
  const SweepResult one = intensity_sweep(short_spec(), modes, {0.0, 2.0}, {1, 2, 3}, 1);
  const SweepResult two = intensity_sweep(short_spec(), modes, {0.0, 2.0}, {1, 2, 3}, 2);
  ASSERT_EQ(one.rows.size(), two.rows.size());
  for (std::size_t i = 0; i < one.rows.size(); ++i) {
    EXPECT_EQ(one.rows[i].delta, two.rows[i].delta);
  }
}

TEST(Sweep, SeedRowsDoNotDependOnTheSeedList) {
  const std::vector<CoherenceMode> modes{CoherenceMode::Common};
  const SweepResult alone = intensity_sweep(short_spec(), modes, {1.0}, {5}, 1);
  const SweepResult mixed = intensity_sweep(short_spec(), modes, {1.0}, {4, 5, 6}, 1);
  EXPECT_EQ(alone.rows[0].delta, mixed.rows[1].delta);
}

TEST(Sweep, ModesCoincideWithoutAidingNoise) {
  const std::vector<CoherenceMode> modes{CoherenceMode::Common, CoherenceMode::Independent,
                                         CoherenceMode::Asymmetric};
  const SweepResult r = intensity_sweep(short_spec(), modes, {0.0}, {1, 2}, 1);
  ASSERT_EQ(r.rows.size(), 6u);
  for (std::size_t i = 2; i < 6; ++i) EXPECT_EQ(r.rows[i].delta, r.rows[i % 2].delta);
}

TEST(Sweep, AggregateStatistics) {
  std::vector<SweepRow> rows{{CoherenceMode::Common, 1.0, 1, 1.0, false},
                             {CoherenceMode::Common, 1.0, 2, 3.0, false},
                             {CoherenceMode::Common, 0.0, 1, std::numeric_limits<double>::infinity(), true}};
  const auto agg = aggregate_rows(rows);
  ASSERT_EQ(agg.size(), 2u);
  EXPECT_EQ(agg[0].sigma, 0.0);
  EXPECT_TRUE(std::isinf(agg[0].mean_delta));
  EXPECT_EQ(agg[0].divergence_fraction, 1.0);
  EXPECT_DOUBLE_EQ(agg[1].mean_delta, 2.0);
  EXPECT_DOUBLE_EQ(agg[1].std_delta, std::sqrt(2.0));
}

SweepResult synthetic(std::vector<double> means, std::vector<double> divergence) {
  SweepResult r;
  for (std::size_t i = 0; i < means.size(); ++i) {
    r.aggregates.push_back({CoherenceMode::Common, 0.5 * static_cast<double>(i), means[i], 0.0,
                            divergence[i]});
  }
  return r;
}

TEST(Threshold, SmallestControlledSigma) {
  EXPECT_EQ(threshold_from_sweep(synthetic({1, 1, 1}, {0, 0, 0}), CoherenceMode::Common, 10.0), 0.0);
  EXPECT_TRUE(std::isinf(
      threshold_from_sweep(synthetic({50, 50, 50}, {0, 0, 0}), CoherenceMode::Common, 10.0)));
  EXPECT_EQ(threshold_from_sweep(synthetic({50, 5, 1}, {0, 0.1, 0}), CoherenceMode::Common, 10.0), 1.0);
  EXPECT_THROW(threshold_from_sweep(synthetic({1}, {0}), CoherenceMode::Independent, 10.0),
               ValidationError);
}

TEST(Threshold, RelativeToUnaidedPlateau) {
  const SweepResult r = synthetic({200, 30, 1}, {0, 0, 0});
  EXPECT_DOUBLE_EQ(relative_delta_threshold(r, 0.1), 20.0);
  EXPECT_EQ(threshold_from_sweep(r, CoherenceMode::Common, relative_delta_threshold(r, 0.1)), 1.0);
  EXPECT_THROW(relative_delta_threshold(r, 0.0), ValidationError);
}

TEST(Cost, MatchedSeeds) {
  ExperimentSpec unaided = short_spec();
  unaided.closed_loop.variant = FeedbackVariant::Full31;
  ExperimentSpec aided = short_spec();
  aided.closed_loop.sigma_c = Eigen::Vector3d::Constant(3.0);
  const CostComparison c = cost_comparison(unaided, aided, {1, 2}, 1);
  ASSERT_EQ(c.psi_unaided.size(), 2u);
  EXPECT_DOUBLE_EQ(c.mean_aided, 0.5 * (c.psi_aided[0] + c.psi_aided[1]));
  EXPECT_EQ(c.psi_unaided[0], run_scenario(unaided, 1).psi);
  aided.x0 = Eigen::Vector3d(1, 1, 1);
  EXPECT_THROW(cost_comparison(unaided, aided, {1}, 1), ValidationError);
}

TEST(Export, SweepRoundTrip) {
  const SweepResult r = intensity_sweep(short_spec(), {CoherenceMode::Common}, {0.0, 2.0}, {1, 2}, 1);
  const fs::path rows = scratch("sweep.csv");
  const fs::path aggs = scratch("aggregates.csv");
  write_sweep_csv(rows, r.rows);
  write_aggregates_csv(aggs, r.aggregates);
  const auto back = read_sweep_csv(rows);
  ASSERT_EQ(back.size(), r.rows.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].delta, r.rows[i].delta);
    EXPECT_EQ(back[i].seed, r.rows[i].seed);
    EXPECT_EQ(back[i].mode, r.rows[i].mode);
  }
  const auto agg_back = read_aggregates_csv(aggs);
  ASSERT_EQ(agg_back.size(), r.aggregates.size());
  EXPECT_EQ(agg_back[1].mean_delta, r.aggregates[1].mean_delta);
}

TEST(Export, EmptySweepIsHeaderOnly) {
  const fs::path p = scratch("empty.csv");
  write_sweep_csv(p, {});
  EXPECT_EQ(slurp(p), "mode,sigma,seed,delta,diverged\n");
  EXPECT_TRUE(read_sweep_csv(p).empty());
}

TEST(Export, TrajectoryStride) {
  ExperimentSpec spec;
  spec.closed_loop.variant = FeedbackVariant::Full31;
  spec.grid = TimeGrid(0.0, 1.0, 1e-4);
  const ScenarioResult r = run_scenario(spec, 1);
  const fs::path p = scratch("traj.csv");
  write_trajectory_csv(p, r.trajectory, 100);
  std::ifstream in(p);
  std::string line;
  std::size_t lines = 0;
  std::getline(in, line);
  EXPECT_EQ(line, "t,x1,x2,x3");
  while (std::getline(in, line)) ++lines;
  EXPECT_EQ(lines, 101u);
}

TEST(Export, NonFiniteValuesRoundTrip) {
  EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_TRUE(std::isinf(parse_double("inf")));
  EXPECT_TRUE(std::isnan(parse_double("nan")));
  EXPECT_EQ(parse_double(format_double(0.1 + 0.2)), 0.1 + 0.2);
  EXPECT_THROW(parse_double("1.5x"), ValidationError);
}

TEST(Export, MissingFileIsAnIoError) {
  EXPECT_THROW(read_sweep_csv(scratch("does_not_exist.csv")), IoError);
  const fs::path file = scratch("plain_file");
  std::ofstream(file) << "x";
  EXPECT_THROW(write_json(file / "report.json", nlohmann::ordered_json::object()), IoError);
}

}  // namespace
}  // namespace wnac
