// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "wnac/chen.hpp"
#include "wnac/conditions.hpp"
#include "wnac/config.hpp"
#include "wnac/harness.hpp"
#include "wnac/io.hpp"
#include "wnac/metrics.hpp"
#include "wnac/rng.hpp"
#include "wnac/sde.hpp"

namespace fs = std::filesystem;
using namespace wnac;

namespace {

// Tolerances and cutoffs.
constexpr double kStepTol = 1e-12;
constexpr double kChaosBound = 100.0;
constexpr double kChaosFinalNorm = 1.0;
constexpr double kChaosDelta = 1e3;
constexpr double kClfRelTol = 1e-9;
constexpr double kClfRadius = 100.0;
constexpr int kClfPoints = 1000;
constexpr double kIssDelta = 10.0;
constexpr double kLossRatio = 10.0;
constexpr int kLossMinSeeds = 8;
constexpr double kRescueLow = 1.5;
constexpr double kRescueHigh = 6.0;
constexpr double kRescueDeltaAt3 = 10.0;
// Controlled means an order of magnitude below the unaided plateau.
constexpr double kRelativeThreshold = 0.1;
constexpr double kReferencePsiUnaided = 2.35e6;
constexpr double kReferencePsiAided = 1.41e6;
constexpr double kCostFactor = 3.0;
constexpr int kScalarDraws = 1000;
constexpr double kScalarTol = 1e-6;
constexpr double kGbmTol = 0.3;

const unsigned kJobs = std::max(1u, std::thread::hardware_concurrency());

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

ExperimentSpec preset(const char* name) { return parse_scenario(preset_json(name)).experiment; }

RowMatrix zeros(const TimeGrid& g, Eigen::Index cols) {
  return RowMatrix::Zero(static_cast<Eigen::Index>(g.n_steps()), cols);
}

Outcome step_oracle() {
  const TimeGrid grid(0.0, 1e-4, 1e-4);
  const Trajectory t = euler_maruyama(build_closed_loop(ClosedLoopSpec{}), Eigen::Vector3d(2, 8, 10),
                                      grid, zeros(grid, 3), zeros(grid, 3));
  const double err = (t.state(1) - Eigen::Vector3d(2.0210, 8.0190, 9.9986)).cwiseAbs().maxCoeff();
  return {err <= kStepTol, "max error " + fmt("%.3g", err)};
}

Outcome chaotic_boundedness() {
  const ExperimentSpec spec = preset("fig2");
  const ScenarioResult r = run_scenario(spec, spec.seeds.front());
  const Trajectory& t = r.trajectory;
  const double sup = t.states.cwiseAbs().maxCoeff();
  const double final_norm = t.state(t.steps_taken()).norm();
  const bool ok = !t.diverged() && sup < kChaosBound && final_norm > kChaosFinalNorm && r.delta > kChaosDelta;
  return {ok, "sup " + fmt("%.4g", sup) + ", |x(100)| " + fmt("%.4g", final_norm) + ", delta " +
                  fmt("%.4g", r.delta)};
}

Outcome clf_identity() {
  NormalStream normal(2024, StreamDomain::Auxiliary, 0);
  Xoshiro256pp uniform(derive_stream_key(2024, StreamDomain::Auxiliary, 1));
  double worst = 0.0;
  for (int i = 0; i < kClfPoints; ++i) {
    Eigen::Vector3d x(normal(), normal(), normal());
    x *= kClfRadius * std::cbrt(uniform.uniform_open_closed()) / x.norm();
    // relative to the size of the individual terms of the bound
    const double scale = x.squaredNorm() * (1.0 + x.norm());
    worst = std::max(worst, std::abs(clf_bound(ChenParams{}, FeedbackVariant::Full31, x)) / scale);
  }
  return {worst <= kClfRelTol, "worst relative " + fmt("%.3g", worst)};
}

std::vector<double> per_seed_delta(const ExperimentSpec& spec, bool& any_diverged) {
  std::vector<double> out;
  any_diverged = false;
  for (auto seed : spec.seeds) {
    bool d = false;
    out.push_back(scenario_delta(spec, seed, &d));
    any_diverged = any_diverged || d;
  }
  return out;
}

std::vector<double> g_full_delta;

Outcome iss_full_feedback() {
  bool diverged = false;
  g_full_delta = per_seed_delta(preset("fig3"), diverged);
  double worst = 0.0;
  for (double d : g_full_delta) worst = std::max(worst, d);
  return {!diverged && worst <= kIssDelta && g_full_delta.size() == 10,
          "max delta " + fmt("%.4g", worst)};
}

Outcome loss_of_control() {
  if (g_full_delta.empty()) {
    bool unused = false;
    g_full_delta = per_seed_delta(preset("fig3"), unused);
  }
  const ExperimentSpec spec = preset("fig4");
  int lost = 0;
  double min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < spec.seeds.size(); ++i) {
    bool diverged = false;
    const double d = scenario_delta(spec, spec.seeds[i], &diverged);
    const double ratio = d / g_full_delta[i];
    min_ratio = std::min(min_ratio, ratio);
    if (diverged || ratio >= kLossRatio) ++lost;
  }
  return {lost >= kLossMinSeeds,
          std::to_string(lost) + "/10 seeds lost, min ratio " + fmt("%.3g", min_ratio)};
}

Outcome noise_rescue() {
  const ScenarioConfig cfg = parse_scenario(preset_json("fig5a"));
  const SweepResult r = intensity_sweep(cfg.experiment, {CoherenceMode::Common}, default_sigma_grid(),
                                        cfg.experiment.seeds, kJobs);
  const double cutoff = relative_delta_threshold(r, kRelativeThreshold, CoherenceMode::Common);
  const double star = threshold_from_sweep(r, CoherenceMode::Common, cutoff);
  double at3 = std::numeric_limits<double>::infinity();
  for (const auto& a : r.aggregates) {
    if (a.sigma == 3.0) at3 = a.mean_delta;
  }
  const bool ok = star >= kRescueLow && star <= kRescueHigh && at3 <= kRescueDeltaAt3;
  return {ok, "sigma* " + format_double(star) + " (cutoff " + fmt("%.4g", cutoff) +
                  "), mean delta at 3 " + fmt("%.3g", at3)};
}

Outcome coherence_ordering() {
  const ScenarioConfig cfg = parse_scenario(preset_json("fig6"));
  const std::vector<CoherenceMode> modes{CoherenceMode::Common, CoherenceMode::Independent,
                                         CoherenceMode::Asymmetric};
  const SweepResult r =
      intensity_sweep(cfg.experiment, modes, default_sigma_grid(), cfg.experiment.seeds, kJobs);
  const double cutoff = relative_delta_threshold(r, kRelativeThreshold, CoherenceMode::Common);
  const double c = threshold_from_sweep(r, CoherenceMode::Common, cutoff);
  const double i = threshold_from_sweep(r, CoherenceMode::Independent, cutoff);
  const double a = threshold_from_sweep(r, CoherenceMode::Asymmetric, cutoff);
  return {c <= i && i <= a, "common " + format_double(c) + ", independent " + format_double(i) +
                                ", asymmetric " + format_double(a) + " (cutoff " + fmt("%.4g", cutoff) + ")"};
}

Outcome cost_saving() {
  const ScenarioConfig cfg = parse_scenario(preset_json("cost"));
  const CostComparison c = cost_comparison(cfg.cost_unaided, cfg.cost_aided, cfg.experiment.seeds, kJobs);
  auto within = [](double v, double ref) { return v >= ref / kCostFactor && v <= ref * kCostFactor; };
  const bool ok = c.mean_aided < c.mean_unaided && within(c.mean_unaided, kReferencePsiUnaided) &&
                  within(c.mean_aided, kReferencePsiAided);
  return {ok, "mean psi unaided " + fmt("%.4g", c.mean_unaided) + ", aided " + fmt("%.4g", c.mean_aided)};
}

ConditionInputs scalar_linear(double a) {
  ConditionInputs in;
  in.A = Matrix::Constant(1, 1, a);
  in.P = Matrix::Identity(1, 1);
  in.L = Matrix::Zero(1, 1);
  in.R = Matrix::Zero(1, 1);
  in.linear_system = true;
  return in;
}

double scalar_decay(double a, double c, double sigma, std::uint64_t seed) {
  SdeSystem sys;
  sys.n = 1;
  sys.l = 1;
  sys.drift = [a](double, const Vector& x, const Vector&, Eigen::Ref<Vector> out) { out = a * x; };
  sys.aiding_diffusion = [c, sigma](const Vector& x, Eigen::Ref<Matrix> out) {
    out(0, 0) = sigma * c * x[0];
  };
  const TimeGrid grid(0.0, 20.0, 1e-3);
  const Trajectory t = euler_maruyama(sys, Vector::Constant(1, 1.0), grid, wiener_increments(grid, 1, seed),
                                      zeros(grid, 0), seed);
  return decay_rate(t, Matrix::Identity(1, 1), 0.0);
}

Outcome scalar_oracle() {
  Xoshiro256pp g(derive_stream_key(7, StreamDomain::Auxiliary, 0));
  double worst = 0.0;
  int disagreements = 0;
  for (int k = 0; k < kScalarDraws; ++k) {
    const double a = 0.01 + 10.0 * g.uniform_open_closed();
    const double c = 0.1 + 5.0 * g.uniform_open_closed();
    const std::vector<double> gains{c};
    const double closed = std::sqrt(2.0 * a) / c;
    const double star = min_aiding_intensity(scalar_linear(a), gains);
    worst = std::max(worst, std::abs(star - closed) / std::max(1.0, closed));
    const std::vector<double> above{closed * (1.0 + 1e-6)};
    const std::vector<double> below{closed * (1.0 - 1e-6)};
    if (!q_corollary(scalar_linear(a), gains, above).passes ||
        q_corollary(scalar_linear(a), gains, below).passes) {
      ++disagreements;
    }
  }
  const double a = 1.0, c = 1.0;
  const std::vector<double> gains{c};
  const double star = min_aiding_intensity(scalar_linear(a), gains);
  int decays = 0, grows = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    if (scalar_decay(a, c, 1.5 * star, seed) < 0.0) ++decays;
    if (scalar_decay(a, c, 0.5 * star, seed) > 0.0) ++grows;
  }
  const bool ok = worst <= kScalarTol && disagreements == 0 && decays == 10 && grows == 10;
  return {ok, "worst relative " + fmt("%.3g", worst) + ", pass/fail disagreements " +
                  std::to_string(disagreements) + ", decays " + std::to_string(decays) +
                  "/10, grows " + std::to_string(grows) + "/10"};
}

Outcome gbm_decay_law() {
  SdeSystem sys;
  sys.n = 1;
  sys.l = 1;
  sys.drift = [](double, const Vector& x, const Vector&, Eigen::Ref<Vector> out) { out = x; };
  sys.aiding_diffusion = [](const Vector& x, Eigen::Ref<Matrix> out) { out(0, 0) = 2.0 * x[0]; };
  const TimeGrid grid(0.0, 50.0, 1e-3);
  double sum = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Trajectory t = euler_maruyama(sys, Vector::Constant(1, 1.0), grid,
                                        wiener_increments(grid, 1, seed), zeros(grid, 0), seed);
    sum += decay_rate(t, Matrix::Identity(1, 1), 0.0);
  }
  const double mean = sum / 10.0;
  return {std::abs(mean + 1.0) <= kGbmTol, "mean rate " + fmt("%.4f", mean)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / "wnac_acceptance";
  fs::create_directories(dir);
  std::vector<std::string> traj, sweep;
  for (int rep = 0; rep < 2; ++rep) {
    const ScenarioConfig fig5b = parse_scenario(preset_json("fig5b"));
    const fs::path tp = dir / ("trajectory_" + std::to_string(rep) + ".csv");
    write_trajectory_csv(tp, run_scenario(fig5b.experiment, 1).trajectory, fig5b.trajectory_stride);
    traj.push_back(slurp(tp));

    ScenarioConfig fig6 = parse_scenario(preset_json("fig6"));
    fig6.experiment.grid = TimeGrid(0.0, 5.0, 1e-4);
    fig6.experiment.window_start = 2.5;
    const SweepResult r =
        intensity_sweep(fig6.experiment, fig6.sweep.modes, {0.0, 3.0}, {1, 2}, rep == 0 ? 1u : kJobs);
    const fs::path sp = dir / ("sweep_" + std::to_string(rep) + ".csv");
    write_sweep_csv(sp, r.rows);
    sweep.push_back(slurp(sp));
  }
  const bool ok = !traj[0].empty() && traj[0] == traj[1] && !sweep[0].empty() && sweep[0] == sweep[1];
  return {ok, "trajectory " + std::to_string(traj[0].size()) + " bytes, sweep " +
                  std::to_string(sweep[0].size()) + " bytes"};
}

}  // namespace

// Usage: wnac_acceptance [N ...] runs the listed criteria, all when none given.
int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"deterministic step oracle", step_oracle},
      {"chaotic boundedness", chaotic_boundedness},
      {"clf identity", clf_identity},
      {"iss under full feedback", iss_full_feedback},
      {"loss of control", loss_of_control},
      {"noise-aided rescue and threshold", noise_rescue},
      {"coherence ordering", coherence_ordering},
      {"cost saving", cost_saving},
      {"scalar condition oracle", scalar_oracle},
      {"geometric brownian decay law", gbm_decay_law},
      {"determinism", determinism},
  };
  std::vector<bool> selected(criteria.size(), argc <= 1);
  for (int a = 1; a < argc; ++a) {
    const int n = std::atoi(argv[a]);
    if (n < 1 || n > static_cast<int>(criteria.size())) {
      std::fprintf(stderr, "unknown criterion '%s'\n", argv[a]);
      return 2;
    }
    selected[static_cast<std::size_t>(n - 1)] = true;
  }
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!selected[i]) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failures;
    std::printf("%s criterion %zu (%s): %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
