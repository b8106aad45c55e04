#include "wnac/config.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "wnac/chen_conditions.hpp"

namespace wnac {

namespace {

Json vec3(double a, double b, double c) { return Json::array({a, b, c}); }

Json closed_loop_override_defaults(std::string_view variant, double sigma) {
  return Json{{"variant", variant},
              {"sigma_c", vec3(sigma, sigma, sigma)},
              {"mode", "common"},
              {"form", "compositional"},
              {"perturbation_sign", "+"}};
}

double number(const Json& j, std::string_view what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
  }
  throw ValidationError(std::string(what) + " must be a number");
}

std::vector<double> number_list(const Json& j, std::string_view what) {
  if (!j.is_array()) throw ValidationError(std::string(what) + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(number(v, what));
  return out;
}

Vector vector_of(const Json& j, std::string_view what) {
  const auto v = number_list(j, what);
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::Vector3d vec3_of(const Json& j, std::string_view what) {
  const Vector v = vector_of(j, what);
  if (v.size() != 3) throw ValidationError(std::string(what) + " must have 3 entries");
  return v;
}

std::string text(const Json& j, std::string_view what) {
  if (!j.is_string()) throw ValidationError(std::string(what) + " must be a string");
  return j.get<std::string>();
}

void merge_into(Json& base, const Json& overlay, const std::string& path) {
  if (!overlay.is_object()) throw ValidationError(path + " must be an object");
  for (const auto& [key, value] : overlay.items()) {
    const std::string where = path.empty() ? key : path + "." + key;
    if (!base.contains(key)) throw ValidationError("unknown configuration key '" + where + "'");
    Json& slot = base[key];
    if (slot.is_object() && value.is_object()) {
      merge_into(slot, value, where);
    } else {
      slot = value;
    }
  }
}

ClosedLoopSpec closed_loop_from(const Json& doc) {
  ClosedLoopSpec cl;
  const Json& params = doc.at("params");
  cl.params = {number(params.at("a"), "params.a"), number(params.at("b"), "params.b"),
               number(params.at("c"), "params.c")};
  cl.variant = parse_feedback_variant(text(doc.at("variant"), "variant"));
  cl.form = parse_drift_form(text(doc.at("form"), "form"));
  cl.sign = parse_perturbation_sign(text(doc.at("perturbation_sign"), "perturbation_sign"));
  cl.sigma_c = vec3_of(doc.at("sigma_c"), "sigma_c");
  cl.mode = parse_coherence_mode(text(doc.at("mode"), "mode"));
  const Json& dist = doc.at("disturbance");
  cl.disturbance.sin_amplitudes = vector_of(dist.at("amplitudes"), "disturbance.amplitudes");
  cl.disturbance.white_intensities = vector_of(dist.at("intensities"), "disturbance.intensities");
  cl.validate();
  return cl;
}

std::optional<double> optional_number(const Json& j, std::string_view what) {
  if (j.is_null()) return std::nullopt;
  return number(j, what);
}

ExperimentSpec experiment_from(const Json& doc) {
  ExperimentSpec spec;
  spec.closed_loop = closed_loop_from(doc);
  const Json& grid = doc.at("grid");
  spec.grid = TimeGrid(number(grid.at("t0"), "grid.t0"), number(grid.at("tf"), "grid.tf"),
                       number(grid.at("dt"), "grid.dt"));
  spec.x0 = vec3_of(doc.at("x0"), "x0");
  spec.seeds.clear();
  if (!doc.at("seeds").is_array()) throw ValidationError("seeds must be an array of integers");
  for (const auto& s : doc.at("seeds")) {
    if (!s.is_number_integer() || s.get<std::int64_t>() < 0) throw ValidationError("seeds must be nonnegative integers");
    spec.seeds.push_back(s.get<std::uint64_t>());
  }
  spec.window_start = number(doc.at("window").at("t_start"), "window.t_start");
  spec.window_end = optional_number(doc.at("window").at("t_end"), "window.t_end");
  spec.cost_start = number(doc.at("cost").at("t_c"), "cost.t_c");
  spec.cost_end = optional_number(doc.at("cost").at("t_end"), "cost.t_end");
  spec.cost_convention = parse_cost_convention(text(doc.at("cost").at("convention"), "cost.convention"));
  spec.decay_fit_fraction = number(doc.at("decay_fit_fraction"), "decay_fit_fraction");
  spec.validate();
  return spec;
}

}  // namespace

std::vector<double> default_sigma_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 12; ++i) grid.push_back(0.5 * i);
  return grid;
}

Json default_scenario_json() {
  Json modes = Json::array({"totally_symmetric", "common", "independent", "asymmetric"});
  return Json{
      {"name", "custom"},
      {"params", {{"a", 35.0}, {"b", 3.0}, {"c", 28.0}}},
      {"variant", "zero"},
      {"form", "compositional"},
      {"perturbation_sign", "+"},
      {"sigma_c", vec3(0.0, 0.0, 0.0)},
      {"mode", "common"},
      {"disturbance", {{"amplitudes", vec3(1.0, 2.0, 0.5)}, {"intensities", vec3(0.5, 0.25, 1.0)}}},
      {"seeds", Json::array({1})},
      {"grid", {{"t0", 0.0}, {"tf", 100.0}, {"dt", 1e-4}}},
      {"x0", vec3(2.0, 8.0, 10.0)},
      {"window", {{"t_start", 0.0}, {"t_end", nullptr}}},
      {"cost", {{"t_c", 0.0}, {"t_end", nullptr}, {"convention", "integral"}}},
      {"decay_fit_fraction", 0.2},
      {"trajectory_stride", 100},
      {"sweep", {{"modes", modes}, {"sigma_grid", default_sigma_grid()}, {"delta_threshold", 100.0}, {"relative_threshold", nullptr}}},
      {"cost_comparison",
       {{"unaided", closed_loop_override_defaults("full31", 0.0)},
        {"aided", closed_loop_override_defaults("weak32", 3.0)},
        {"convention", "step_sum"}}},
  };
}

Json complete_scenario_json(const Json& doc) {
  Json full = default_scenario_json();
  merge_into(full, doc, "");
  return full;
}

void apply_override(Json& doc, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ValidationError("override '" + std::string(assignment) + "' is not key=value");
  }
  const std::string key(assignment.substr(0, eq));
  const std::string raw(assignment.substr(eq + 1));
  Json value;
  try {
    value = Json::parse(raw);
  } catch (const nlohmann::json::parse_error&) {
    value = raw;
  }
  Json* slot = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (!slot->is_object() || !slot->contains(part)) {
      throw ValidationError("override references unknown key '" + key + "'");
    }
    slot = &(*slot)[part];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  *slot = value;
}

ScenarioConfig parse_scenario(const Json& doc_in) {
  const Json doc = complete_scenario_json(doc_in);
  ScenarioConfig cfg;
  cfg.name = text(doc.at("name"), "name");
  cfg.experiment = experiment_from(doc);
  const Json& stride = doc.at("trajectory_stride");
  if (!stride.is_number_integer() || stride.get<std::int64_t>() <= 0) {
    throw ValidationError("trajectory_stride must be a positive integer");
  }
  cfg.trajectory_stride = stride.get<std::size_t>();

  const Json& sweep = doc.at("sweep");
  cfg.sweep.modes.clear();
  for (const auto& m : sweep.at("modes")) cfg.sweep.modes.push_back(parse_coherence_mode(text(m, "sweep.modes")));
  cfg.sweep.sigma_grid = number_list(sweep.at("sigma_grid"), "sweep.sigma_grid");
  cfg.sweep.delta_threshold = number(sweep.at("delta_threshold"), "sweep.delta_threshold");
  if (const Json& rel = sweep.at("relative_threshold"); !rel.is_null()) {
    cfg.sweep.relative_threshold = number(rel, "sweep.relative_threshold");
    if (!(*cfg.sweep.relative_threshold > 0.0)) {
      throw ValidationError("sweep.relative_threshold must be positive");
    }
  }
  if (cfg.sweep.modes.empty()) throw ValidationError("sweep.modes must be nonempty");

  const Json& cc = doc.at("cost_comparison");
  const CostConvention conv = parse_cost_convention(text(cc.at("convention"), "cost_comparison.convention"));
  auto derived = [&](const char* which) {
    Json side = doc;
    merge_into(side, cc.at(which), std::string("cost_comparison.") + which);
    ExperimentSpec spec = experiment_from(side);
    spec.cost_convention = conv;
    return spec;
  };
  cfg.cost_unaided = derived("unaided");
  cfg.cost_aided = derived("aided");
  return cfg;
}

CoherenceMode SweepConfig::reference_mode() const {
  for (auto m : modes) {
    if (m == CoherenceMode::Common) return m;
  }
  if (modes.empty()) throw ValidationError("sweep.modes must be nonempty");
  return modes.front();
}

double SweepConfig::threshold_for(const SweepResult& result) const {
  if (!relative_threshold) return delta_threshold;
  return relative_delta_threshold(result, *relative_threshold, reference_mode());
}

std::vector<std::string> preset_names() {
  return {"fig2", "fig3", "fig4", "fig5a", "fig5b", "fig6", "cost"};
}

Json preset_json(std::string_view name) {
  const Json quiet = {{"amplitudes", vec3(0.0, 0.0, 0.0)}, {"intensities", vec3(0.0, 0.0, 0.0)}};
  const Json ten_seeds = Json::array({1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
  if (name == "fig2") {
    return {{"name", "fig2"}, {"variant", "zero"}, {"disturbance", quiet}};
  }
  if (name == "fig3") {
    return {{"name", "fig3"}, {"variant", "full31"}, {"seeds", ten_seeds},
            {"window", {{"t_start", 50.0}}}};
  }
  if (name == "fig4") {
    return {{"name", "fig4"}, {"variant", "weak32"}, {"seeds", ten_seeds},
            {"window", {{"t_start", 50.0}}}};
  }
  if (name == "fig5a") {
    return {{"name", "fig5a"}, {"variant", "weak32"}, {"seeds", ten_seeds},
            {"window", {{"t_start", 50.0}}},
            {"sweep", {{"relative_threshold", 0.1}}}};
  }
  if (name == "fig5b") {
    return {{"name", "fig5b"}, {"variant", "weak32"}, {"sigma_c", vec3(3.0, 3.0, 3.0)},
            {"mode", "common"}};
  }
  if (name == "fig6") {
    return {{"name", "fig6"}, {"variant", "weaker34"}, {"seeds", ten_seeds},
            {"window", {{"t_start", 50.0}}},
            {"sweep",
             {{"modes", Json::array({"common", "independent", "asymmetric"})},
              {"relative_threshold", 0.1}}}};
  }
  if (name == "cost") {
    return {{"name", "cost"}, {"seeds", ten_seeds}};
  }
  throw ValidationError("unknown preset '" + std::string(name) +
                        "' (expected fig2, fig3, fig4, fig5a, fig5b, fig6 or cost)");
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

Matrix matrix_from_json(const Json& j, std::string_view what) {
  if (j.is_number()) return Matrix::Constant(1, 1, j.get<double>());
  if (!j.is_array() || j.empty()) {
    throw ValidationError(std::string(what) + " must be a number or a nonempty array of rows");
  }
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (!j[0].is_array()) throw ValidationError(std::string(what) + " must be an array of rows");
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw ValidationError(std::string(what) + " has ragged rows");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = number(row[static_cast<std::size_t>(c)], what);
  }
  return m;
}

namespace {

std::vector<NoiseChannelBound> channels_from(const Json& j, Eigen::Index n, std::string_view what) {
  std::vector<NoiseChannelBound> out;
  if (j.is_null()) return out;
  if (!j.is_array()) throw ValidationError(std::string(what) + " must be an array");
  for (const auto& ch : j) {
    NoiseChannelBound b;
    b.sigma = number(ch.at("sigma"), "sigma");
    b.K = ch.contains("K") ? matrix_from_json(ch.at("K"), "K") : Matrix::Zero(n, n);
    b.J = ch.contains("J") ? matrix_from_json(ch.at("J"), "J") : Matrix::Zero(n, n);
    b.alpha = ch.contains("alpha") ? number(ch.at("alpha"), "alpha") : 0.0;
    out.push_back(std::move(b));
  }
  return out;
}

}  // namespace

ConditionTask parse_condition_task(const Json& doc) {
  static const std::vector<std::string> known = {
      "kind", "A", "P", "L", "R", "epsilon", "linear_system", "aiding", "disturbance",
      "c", "sigma_c", "tolerance", "chen"};
  if (!doc.is_object()) throw ValidationError("condition file must hold a JSON object");
  for (const auto& [key, _] : doc.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ValidationError("unknown condition key '" + key + "'");
    }
  }

  ConditionTask task;
  const std::string kind = doc.contains("kind") ? text(doc.at("kind"), "kind") : "theorem1";
  if (kind == "theorem1") {
    task.kind = ConditionTask::Kind::Theorem1;
  } else if (kind == "theorem2") {
    task.kind = ConditionTask::Kind::Theorem2;
  } else if (kind == "corollary") {
    task.kind = ConditionTask::Kind::Corollary;
  } else {
    throw ValidationError("unknown condition kind '" + kind +
                          "' (expected theorem1, theorem2 or corollary)");
  }

  ConditionInputs& in = task.inputs;
  if (doc.contains("chen")) {
    const Json& chen = doc.at("chen");
    ChenParams params;
    if (chen.contains("params")) {
      params = {number(chen.at("params").at("a"), "a"), number(chen.at("params").at("b"), "b"),
                number(chen.at("params").at("c"), "c")};
    }
    const auto variant = parse_feedback_variant(
        chen.contains("variant") ? text(chen.at("variant"), "chen.variant") : "weak32");
    const double theta = number(chen.at("theta"), "chen.theta");
    const std::size_t samples =
        chen.contains("lipschitz_samples") ? chen.at("lipschitz_samples").get<std::size_t>() : 100000;
    in = chen_condition_inputs(params, variant, theta, samples);
  } else {
    in.A = matrix_from_json(doc.at("A"), "A");
    const Eigen::Index n = in.A.rows();
    in.P = doc.contains("P") ? matrix_from_json(doc.at("P"), "P") : Matrix::Identity(n, n);
    in.L = doc.contains("L") ? matrix_from_json(doc.at("L"), "L") : Matrix::Zero(n, n);
    in.R = doc.contains("R") ? matrix_from_json(doc.at("R"), "R") : Matrix::Zero(n, n);
    in.linear_system = doc.value("linear_system", false);
  }
  if (doc.contains("epsilon")) {
    const Json& e = doc.at("epsilon");
    if (e.is_string() && e.get<std::string>() == "auto") {
      in.epsilon.reset();
    } else {
      in.epsilon = number(e, "epsilon");
    }
  }
  const Eigen::Index n = in.A.rows();
  if (doc.contains("aiding")) in.aiding = channels_from(doc.at("aiding"), n, "aiding");
  if (doc.contains("disturbance")) in.disturbance = channels_from(doc.at("disturbance"), n, "disturbance");
  if (doc.contains("c")) task.c = number_list(doc.at("c"), "c");
  if (doc.contains("sigma_c")) task.sigma_c = number_list(doc.at("sigma_c"), "sigma_c");
  if (doc.contains("tolerance")) task.tolerance = number(doc.at("tolerance"), "tolerance");
  if (task.kind == ConditionTask::Kind::Corollary) {
    if (task.c.empty()) task.c.assign(doc.contains("chen") ? 3 : 1, 1.0);
    if (!task.sigma_c.empty() && task.sigma_c.size() != task.c.size()) {
      throw ValidationError("sigma_c and c differ in length");
    }
  }
  in.validate();
  return task;
}

Json report_to_json(const ConditionReport& report) {
  Json spectrum = Json::array();
  for (Eigen::Index i = 0; i < report.spectrum.size(); ++i) spectrum.push_back(report.spectrum[i]);
  return Json{{"passes", report.passes},
              {"lambda_min_Q", report.lambda_min_Q},
              {"spectrum", spectrum},
              {"epsilon_used", report.epsilon_used},
              {"decay_bound", report.decay_bound},
              {"Q", matrix_to_json(report.Q)}};
}

}  // namespace wnac
