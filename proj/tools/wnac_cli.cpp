// wnac: simulate / sweep / cost / check-conditions workflows.
//
// Exit codes: 0 success, 1 validation error, 2 I/O error.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wnac/conditions.hpp"
#include "wnac/config.hpp"
#include "wnac/harness.hpp"
#include "wnac/io.hpp"

namespace fs = std::filesystem;
using wnac::Json;

namespace {

struct CommonOptions {
  std::string config;
  std::string preset;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  unsigned jobs = 0;
  std::vector<std::string> overrides;
};

Json number_or_text(double v) {
  if (std::isfinite(v)) return v;
  return wnac::format_double(v);
}

Json load_scenario_json(const CommonOptions& opt) {
  if (opt.config.empty() == opt.preset.empty()) {
    throw wnac::ValidationError("exactly one of --config and --preset is required");
  }
  Json doc = opt.preset.empty() ? wnac::read_json(opt.config) : wnac::preset_json(opt.preset);
  if (!opt.config.empty() && !doc.contains("name")) doc["name"] = fs::path(opt.config).stem().string();
  Json full = wnac::complete_scenario_json(doc);
  for (const auto& o : opt.overrides) wnac::apply_override(full, o);
  if (opt.seed) full["seeds"] = Json::array({*opt.seed});
  return full;
}

fs::path output_dir(const CommonOptions& opt, const std::string& name) {
  return fs::path(opt.out) / name;
}

int run_simulate(const CommonOptions& opt) {
  const Json doc = load_scenario_json(opt);
  const wnac::ScenarioConfig cfg = wnac::parse_scenario(doc);
  const fs::path dir = output_dir(opt, cfg.name);

  Json runs = Json::array();
  double delta_sum = 0.0;
  std::optional<wnac::ScenarioResult> first;
  for (std::uint64_t seed : cfg.experiment.seeds) {
    wnac::ScenarioResult r = wnac::run_scenario(cfg.experiment, seed);
    Json run{{"seed", seed},
             {"delta", number_or_text(r.delta)},
             {"psi", number_or_text(r.psi)},
             {"decay_rate", number_or_text(r.decay_rate)},
             {"diverged", r.trajectory.diverged()}};
    if (r.trajectory.diverged_at) run["diverged_at"] = *r.trajectory.diverged_at;
    runs.push_back(run);
    delta_sum += r.delta;
    if (!first) first = std::move(r);
  }
  const double mean_delta = delta_sum / static_cast<double>(cfg.experiment.seeds.size());

  wnac::write_trajectory_csv(dir / "trajectory.csv", first->trajectory, cfg.trajectory_stride);
  wnac::write_json(dir / "report.json", Json{{"workflow", "simulate"},
                                             {"name", cfg.name},
                                             {"mean_delta", number_or_text(mean_delta)},
                                             {"runs", runs},
                                             {"config", doc}});
  std::cout << cfg.name << ": delta=" << wnac::format_double(first->delta)
            << " psi=" << wnac::format_double(first->psi)
            << " decay_rate=" << wnac::format_double(first->decay_rate)
            << " mean_delta=" << wnac::format_double(mean_delta) << '\n';
  return 0;
}

int run_sweep(const CommonOptions& opt) {
  const Json doc = load_scenario_json(opt);
  const wnac::ScenarioConfig cfg = wnac::parse_scenario(doc);
  const fs::path dir = output_dir(opt, cfg.name);

  const wnac::SweepResult result = wnac::intensity_sweep(
      cfg.experiment, cfg.sweep.modes, cfg.sweep.sigma_grid, cfg.experiment.seeds, opt.jobs);
  wnac::write_sweep_csv(dir / "sweep.csv", result.rows);
  wnac::write_aggregates_csv(dir / "aggregates.csv", result.aggregates);

  const double cutoff = cfg.sweep.threshold_for(result);
  Json thresholds = Json::object();
  std::cout << cfg.name << ":";
  for (auto mode : cfg.sweep.modes) {
    const double s = wnac::threshold_from_sweep(result, mode, cutoff);
    thresholds[std::string(wnac::to_string(mode))] = number_or_text(s);
    std::cout << ' ' << wnac::to_string(mode) << "_sigma_star=" << wnac::format_double(s);
  }
  std::cout << '\n';
  wnac::write_json(dir / "report.json", Json{{"workflow", "sweep"},
                                             {"name", cfg.name},
                                             {"delta_threshold", number_or_text(cutoff)},
                                             {"thresholds", thresholds},
                                             {"config", doc}});
  return 0;
}

int run_cost(const CommonOptions& opt) {
  const Json doc = load_scenario_json(opt);
  const wnac::ScenarioConfig cfg = wnac::parse_scenario(doc);
  const fs::path dir = output_dir(opt, cfg.name);
  const auto& seeds = cfg.experiment.seeds;

  const wnac::CostComparison cmp =
      wnac::cost_comparison(cfg.cost_unaided, cfg.cost_aided, seeds, opt.jobs);

  Json per_seed = Json::array();
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    per_seed.push_back({{"seed", seeds[i]},
                        {"psi_unaided", number_or_text(cmp.psi_unaided[i])},
                        {"psi_aided", number_or_text(cmp.psi_aided[i])}});
  }
  wnac::write_json(dir / "report.json",
                   Json{{"workflow", "cost"},
                        {"name", cfg.name},
                        {"convention", wnac::to_string(cfg.cost_aided.cost_convention)},
                        {"psi_unaided", number_or_text(cmp.mean_unaided)},
                        {"psi_aided", number_or_text(cmp.mean_aided)},
                        {"runs", per_seed},
                        {"config", doc}});
  std::cout << cfg.name << ": psi_unaided=" << wnac::format_double(cmp.mean_unaided)
            << " psi_aided=" << wnac::format_double(cmp.mean_aided) << '\n';
  return 0;
}

int run_check_conditions(const CommonOptions& opt) {
  if (opt.config.empty()) throw wnac::ValidationError("check-conditions requires --config");
  const Json doc = wnac::read_json(opt.config);
  const wnac::ConditionTask task = wnac::parse_condition_task(doc);
  const fs::path dir = output_dir(opt, fs::path(opt.config).stem().string());

  Json report;
  std::optional<double> sigma_star;
  switch (task.kind) {
    case wnac::ConditionTask::Kind::Theorem1:
      report = wnac::report_to_json(wnac::q_theorem1(task.inputs));
      report["kind"] = "theorem1";
      break;
    case wnac::ConditionTask::Kind::Theorem2:
      report = wnac::report_to_json(wnac::q_theorem2(task.inputs));
      report["kind"] = "theorem2";
      break;
    case wnac::ConditionTask::Kind::Corollary: {
      sigma_star = wnac::min_aiding_intensity(task.inputs, task.c, task.tolerance);
      std::vector<double> sigma = task.sigma_c;
      if (sigma.empty()) sigma.assign(task.c.size(), *sigma_star);
      report = wnac::report_to_json(wnac::q_corollary(task.inputs, task.c, sigma));
      report["kind"] = "corollary";
      report["sigma_star"] = *sigma_star;
      Json s = Json::array();
      for (double v : sigma) s.push_back(v);
      report["sigma_c"] = s;
      break;
    }
  }
  wnac::write_json(dir / "report.json", report);
  std::cout << "passes=" << (report["passes"].get<bool>() ? "true" : "false")
            << " lambda_min_Q=" << wnac::format_double(report["lambda_min_Q"].get<double>());
  if (sigma_star) std::cout << " sigma_star=" << wnac::format_double(*sigma_star);
  std::cout << '\n';
  return 0;
}

void add_common(CLI::App* cmd, CommonOptions& opt, bool scenario) {
  cmd->add_option("--config", opt.config, "JSON input file");
  cmd->add_option("--out", opt.out, "Output directory")->capture_default_str();
  if (!scenario) return;
  cmd->add_option("--preset", opt.preset, "Bundled scenario: fig2 fig3 fig4 fig5a fig5b fig6 cost");
  cmd->add_option("--seed", opt.seed, "Run a single seed");
  cmd->add_option("--jobs", opt.jobs, "Worker threads (0 = all cores)")->capture_default_str();
  cmd->add_option("--set", opt.overrides, "Override a config key: key=value (repeatable)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"White-noise-aided control: simulation, sweeps and ISS condition checks"};
  app.require_subcommand(1);
  CommonOptions opt;
  auto* simulate = app.add_subcommand("simulate", "Simulate a scenario and export its trajectory");
  auto* sweep = app.add_subcommand("sweep", "Deviation versus aiding intensity per coherence mode");
  auto* cost = app.add_subcommand("cost", "Control cost with and without aiding noise");
  auto* check = app.add_subcommand("check-conditions", "Assemble Q and test positive definiteness");
  add_common(simulate, opt, true);
  add_common(sweep, opt, true);
  add_common(cost, opt, true);
  add_common(check, opt, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (simulate->parsed()) return run_simulate(opt);
    if (sweep->parsed()) return run_sweep(opt);
    if (cost->parsed()) return run_cost(opt);
    if (check->parsed()) return run_check_conditions(opt);
  } catch (const wnac::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const wnac::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: malformed configuration: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
