#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "wnac/conditions.hpp"
#include "wnac/harness.hpp"

namespace wnac {

using Json = nlohmann::ordered_json;

// Sweep section of a scenario file.
struct SweepConfig {
  std::vector<CoherenceMode> modes{CoherenceMode::TotallySymmetric, CoherenceMode::Common,
                                   CoherenceMode::Independent, CoherenceMode::Asymmetric};
  std::vector<double> sigma_grid;  // default 0, 0.5, ..., 6
  double delta_threshold = 100.0;
  // When set, overrides delta_threshold with relative_delta_threshold of the
  // sweep, referenced to common mode if swept and the first mode otherwise.
  std::optional<double> relative_threshold;

  CoherenceMode reference_mode() const;
  double threshold_for(const SweepResult& result) const;
};

struct ScenarioConfig {
  std::string name;
  ExperimentSpec experiment;
  std::size_t trajectory_stride = 100;
  SweepConfig sweep;
  // Cost workflow: the unaided and aided scenarios.
  ExperimentSpec cost_unaided;
  ExperimentSpec cost_aided;
};

std::vector<double> default_sigma_grid();

// Scenario JSON with every key filled in from defaults.
Json default_scenario_json();

// Overlays `doc` on the defaults; unknown keys are rejected.
Json complete_scenario_json(const Json& doc);

// Applies "a.b.c=value" where value is parsed as JSON, falling back to a
// string. The key must already exist in `doc`.
void apply_override(Json& doc, std::string_view assignment);

ScenarioConfig parse_scenario(const Json& doc);

// Bundled scenario files: fig2, fig3, fig4, fig5a, fig5b, fig6, cost.
std::vector<std::string> preset_names();
Json preset_json(std::string_view name);

// Condition-inputs file for the check-conditions workflow.
struct ConditionTask {
  enum class Kind { Theorem1, Theorem2, Corollary };
  Kind kind = Kind::Theorem1;
  ConditionInputs inputs;
  std::vector<double> c;        // corollary channel gains
  std::vector<double> sigma_c;  // corollary intensities; empty = solve for sigma*
  double tolerance = 1e-10;
};

ConditionTask parse_condition_task(const Json& doc);
Json report_to_json(const ConditionReport& report);
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j, std::string_view what);

}  // namespace wnac
