// Python bindings. Scenario and condition documents cross the boundary as JSON
// text; the wnac package wraps them as dicts.
#include <optional>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wnac/chen.hpp"
#include "wnac/conditions.hpp"
#include "wnac/config.hpp"
#include "wnac/harness.hpp"
#include "wnac/io.hpp"
#include "wnac/noise.hpp"

namespace py = pybind11;
using wnac::Json;

namespace {

wnac::ScenarioConfig scenario_from(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw wnac::ValidationError(std::string("scenario is not valid JSON: ") + e.what());
  }
  return wnac::parse_scenario(doc);
}

py::dict simulate(const std::string& text, std::uint64_t seed) {
  const wnac::ScenarioConfig cfg = scenario_from(text);
  std::optional<wnac::ScenarioResult> result;
  {
    py::gil_scoped_release release;
    result = wnac::run_scenario(cfg.experiment, seed);
  }
  const wnac::ScenarioResult& r = *result;
  const auto& traj = r.trajectory;
  Eigen::VectorXd t(traj.states.rows());
  for (Eigen::Index k = 0; k < t.size(); ++k) t[k] = traj.grid.time(static_cast<std::size_t>(k));
  py::dict out;
  out["t"] = t;
  out["states"] = Eigen::MatrixXd(traj.states);
  out["delta"] = r.delta;
  out["psi"] = r.psi;
  out["decay_rate"] = r.decay_rate;
  out["diverged_at"] = traj.diverged_at ? py::object(py::int_(*traj.diverged_at)) : py::none();
  return out;
}

py::dict sweep(const std::string& text, unsigned jobs) {
  const wnac::ScenarioConfig cfg = scenario_from(text);
  wnac::SweepResult r;
  {
    py::gil_scoped_release release;
    r = wnac::intensity_sweep(cfg.experiment, cfg.sweep.modes, cfg.sweep.sigma_grid,
                              cfg.experiment.seeds, jobs);
  }
  py::list rows;
  for (const auto& row : r.rows) {
    rows.append(py::make_tuple(std::string(wnac::to_string(row.mode)), row.sigma, row.seed,
                               row.delta, row.diverged));
  }
  py::list aggregates;
  for (const auto& a : r.aggregates) {
    aggregates.append(py::make_tuple(std::string(wnac::to_string(a.mode)), a.sigma, a.mean_delta,
                                     a.std_delta, a.divergence_fraction));
  }
  const double cutoff = cfg.sweep.threshold_for(r);
  py::dict thresholds;
  for (auto mode : cfg.sweep.modes) {
    thresholds[py::str(std::string(wnac::to_string(mode)))] = wnac::threshold_from_sweep(r, mode, cutoff);
  }
  py::dict out;
  out["rows"] = rows;
  out["aggregates"] = aggregates;
  out["delta_threshold"] = cutoff;
  out["thresholds"] = thresholds;
  return out;
}

py::dict cost(const std::string& text, unsigned jobs) {
  const wnac::ScenarioConfig cfg = scenario_from(text);
  wnac::CostComparison c;
  {
    py::gil_scoped_release release;
    c = wnac::cost_comparison(cfg.cost_unaided, cfg.cost_aided, cfg.experiment.seeds, jobs);
  }
  py::dict out;
  out["psi_unaided"] = c.psi_unaided;
  out["psi_aided"] = c.psi_aided;
  out["mean_unaided"] = c.mean_unaided;
  out["mean_aided"] = c.mean_aided;
  return out;
}

std::string check_conditions(const std::string& text) {
  const wnac::ConditionTask task = wnac::parse_condition_task(Json::parse(text));
  Json report;
  switch (task.kind) {
    case wnac::ConditionTask::Kind::Theorem1:
      report = wnac::report_to_json(wnac::q_theorem1(task.inputs));
      break;
    case wnac::ConditionTask::Kind::Theorem2:
      report = wnac::report_to_json(wnac::q_theorem2(task.inputs));
      break;
    case wnac::ConditionTask::Kind::Corollary: {
      const double star = wnac::min_aiding_intensity(task.inputs, task.c, task.tolerance);
      std::vector<double> sigma = task.sigma_c;
      if (sigma.empty()) sigma.assign(task.c.size(), star);
      report = wnac::report_to_json(wnac::q_corollary(task.inputs, task.c, sigma));
      report["sigma_star"] = star;
      break;
    }
  }
  return report.dump();
}

py::tuple increments(const std::string& mode, double t0, double tf, double dt, std::size_t l,
                     std::size_t p, std::uint64_t seed) {
  wnac::NoiseIncrements inc =
      wnac::correlated_increments(wnac::parse_coherence_mode(mode), wnac::TimeGrid(t0, tf, dt), l, p, seed);
  return py::make_tuple(Eigen::MatrixXd(inc.aiding), Eigen::MatrixXd(inc.disturbance));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "White-noise-aided control core";

  py::register_exception<wnac::ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<wnac::IoError>(m, "IoError", PyExc_OSError);

  m.def("preset_names", &wnac::preset_names);
  m.def("preset", [](const std::string& name) { return wnac::preset_json(name).dump(); },
        py::arg("name"));
  m.def("complete", [](const std::string& text) {
    return wnac::complete_scenario_json(Json::parse(text)).dump();
  });

  m.def("simulate", &simulate, py::arg("config"), py::arg("seed") = 1);
  m.def("sweep", &sweep, py::arg("config"), py::arg("jobs") = 0);
  m.def("cost_comparison", &cost, py::arg("config"), py::arg("jobs") = 0);
  m.def("check_conditions", &check_conditions, py::arg("config"));
  m.def("correlated_increments", &increments, py::arg("mode"), py::arg("t0"), py::arg("tf"),
        py::arg("dt"), py::arg("l"), py::arg("p"), py::arg("seed"));

  m.def("chen_drift",
        [](const std::string& variant, const Eigen::Vector3d& x, const Eigen::Vector3d& omega) {
          wnac::ClosedLoopSpec spec;
          spec.variant = wnac::parse_feedback_variant(variant);
          return Eigen::Vector3d(wnac::closed_loop_drift(spec, x, omega));
        },
        py::arg("variant"), py::arg("x"), py::arg("omega") = Eigen::Vector3d::Zero());
  m.def("clf_bound",
        [](const std::string& variant, const Eigen::Vector3d& x) {
          return wnac::clf_bound(wnac::ChenParams{}, wnac::parse_feedback_variant(variant), x);
        },
        py::arg("variant"), py::arg("x"));
}
