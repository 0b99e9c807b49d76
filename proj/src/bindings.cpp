#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ppolab/driver.hpp"
#include "ppolab/gae.hpp"
#include "ppolab/metrics.hpp"
#include "ppolab/presets.hpp"
#include "ppolab/sweep.hpp"

namespace py = pybind11;

namespace {

using namespace ppolab;

// Configs and reports cross the boundary as JSON text: the C++ side already
// round-trips every value exactly through that form, and the python package
// turns the strings into plain dicts.
json parse_document(const std::string& text, const char* what) {
  const json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw ConfigError(std::string(what) + " is not valid JSON");
  return doc;
}

RunConfig config_from_text(const std::string& text) {
  const RunConfig cfg = run_config_from_json(parse_document(text, "config"));
  validate(cfg);
  return cfg;
}

std::string train_json(const std::string& config_text) {
  const RunConfig cfg = config_from_text(config_text);
  const RunResult res = train(cfg);

  json doc;
  doc["completed"] = res.completed;
  doc["nan_aborted"] = res.nan_aborted;
  doc["iterations"] = res.iterations_done;
  doc["transitions"] = res.transitions_done;
  if (res.eval_points.empty())
    doc["final_eval_mean"] = nullptr;
  else
    doc["final_eval_mean"] = res.eval_points.back().mean_return;
  doc["best_eval_mean"] = res.best_mean;
  doc["best_eval_index"] = res.best_eval_index;

  json evals = json::array();
  for (const EvalPoint& p : res.eval_points) {
    json e;
    e["index"] = p.index;
    e["transitions"] = p.transitions;
    e["mean_return"] = p.mean_return;
    evals.push_back(e);
  }
  doc["eval_points"] = evals;

  json diags = json::array();
  for (const IterationDiag& d : res.diagnostics) {
    json rec;
    rec["iteration"] = d.iteration;
    rec["transitions"] = d.transitions;
    rec["outer_grad_norm"] = d.outer_grad_norm;
    rec["momentum_effect_norm"] = d.momentum_effect_norm;
    rec["policy_loss"] = d.policy_loss;
    rec["value_loss"] = d.value_loss;
    rec["clip_fraction"] = d.clip_fraction;
    rec["mean_ratio"] = d.mean_ratio;
    rec["active_fraction"] = d.active_fraction;
    rec["entropy"] = d.entropy;
    diags.push_back(rec);
  }
  doc["diagnostics"] = diags;

  if (res.completed) {
    json abs;
    abs["episodes"] = res.absolute_returns.size();
    abs["mean"] = res.absolute_mean;
    abs["stderr"] = res.absolute_stderr;
    abs["returns"] = res.absolute_returns;
    doc["absolute_eval"] = abs;
  } else {
    doc["absolute_eval"] = nullptr;
  }

  std::vector<double> params(res.final_theta.size());
  for (std::size_t i = 0; i < params.size(); ++i)
    params[i] = res.final_theta.data()[static_cast<Eigen::Index>(i)];
  doc["final_params"] = params;
  return doc.dump();
}

std::vector<double> evaluate_json(const std::string& config_text,
                                  const std::vector<double>& params, int episodes,
                                  std::uint64_t seed) {
  const RunConfig cfg = config_from_text(config_text);
  const ActorCritic net = build_network(cfg);
  if (params.size() != net.layout->total_size())
    throw ConfigError("parameter vector has " + std::to_string(params.size()) +
                      " values, the configured network needs " +
                      std::to_string(net.layout->total_size()));
  if (episodes < 1) throw ConfigError("episodes must be positive");
  ParamVector theta(net.layout);
  for (std::size_t i = 0; i < params.size(); ++i)
    theta.data()[static_cast<Eigen::Index>(i)] = params[i];
  return evaluate_policy(net, theta, cfg.env, episodes, seed);
}

std::pair<std::vector<double>, std::vector<double>> gae_single_env(
    const std::vector<double>& rewards, const std::vector<double>& values,
    const std::vector<double>& next_values, const std::vector<bool>& terminated,
    const std::vector<bool>& truncated, double gamma, double lambda) {
  const std::size_t n = rewards.size();
  if (values.size() != n || next_values.size() != n || terminated.size() != n ||
      truncated.size() != n)
    throw std::invalid_argument("gae: all inputs must have the same length");

  TransitionBatch batch;
  batch.T = static_cast<int>(n);
  batch.N = 1;
  batch.rewards.resize(static_cast<Eigen::Index>(n));
  batch.values.resize(static_cast<Eigen::Index>(n));
  batch.next_values.resize(static_cast<Eigen::Index>(n));
  batch.terminated.resize(n);
  batch.truncated.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    batch.rewards[static_cast<Eigen::Index>(i)] = rewards[i];
    batch.values[static_cast<Eigen::Index>(i)] = values[i];
    batch.next_values[static_cast<Eigen::Index>(i)] = next_values[i];
    batch.terminated[i] = terminated[i] ? 1 : 0;
    batch.truncated[i] = truncated[i] ? 1 : 0;
  }

  const AdvantageEstimate est = compute_gae(batch, gamma, lambda);
  std::vector<double> adv(n), targets(n);
  for (std::size_t i = 0; i < n; ++i) {
    adv[i] = est.advantages[static_cast<Eigen::Index>(i)];
    targets[i] = est.value_targets[static_cast<Eigen::Index>(i)];
  }
  return {adv, targets};
}

ScoreMatrix matrix_from_text(const std::string& text, const char* what) {
  const json doc = parse_document(text, what);
  if (!doc.is_object()) throw ConfigError(std::string(what) + " must map tasks to score lists");
  ScoreMatrix m;
  m.method = what;
  for (const auto& [task, scores] : doc.items())
    m.scores[task] = scores.get<std::vector<double>>();
  return m;
}

std::string aggregate_json(const std::string& scores_text) {
  const ScoreMatrix m = matrix_from_text(scores_text, "scores");
  return aggregate_report_to_json(aggregate_point_estimates(m)).dump();
}

std::string poi_json(const std::string& method_text, const std::string& baseline_text) {
  const ScoreMatrix x = matrix_from_text(method_text, "method scores");
  const ScoreMatrix y = matrix_from_text(baseline_text, "baseline scores");
  const PointEstimate p = probability_of_improvement(x, y);
  json doc;
  doc["value"] = p.value;
  doc["ci_lo"] = p.ci_lo;
  doc["ci_hi"] = p.ci_hi;
  return doc.dump();
}

std::string reference_table_json() {
  json doc = json::object();
  for (const auto& [task, range] : reference_normalization_table().range)
    doc[task] = json::array({range.first, range.second});
  return doc.dump();
}

}  // namespace

PYBIND11_MODULE(_ppolab, m) {
  m.doc() = "Native core of the PPO outer-update laboratory";

  py::register_exception<ConfigError>(m, "ConfigError");

  m.def("default_config_json", [] { return run_config_to_json(RunConfig{}).dump(); },
        "Fully resolved default run config as JSON text");
  m.def("validate_config_json", [](const std::string& text) { config_from_text(text); },
        py::arg("config_json"), "Raises ConfigError unless the config is complete and valid");
  m.def("train_json", &train_json, py::arg("config_json"),
        py::call_guard<py::gil_scoped_release>(),
        "Runs one seeded training run; returns the result document as JSON text");
  m.def("evaluate_json", &evaluate_json, py::arg("config_json"), py::arg("params"),
        py::arg("episodes"), py::arg("seed"), py::call_guard<py::gil_scoped_release>(),
        "Raw episode returns of the given flat parameters under the config's environment");
  m.def("gae", &gae_single_env, py::arg("rewards"), py::arg("values"), py::arg("next_values"),
        py::arg("terminated"), py::arg("truncated"), py::arg("gamma"), py::arg("lambda_"),
        "Generalized advantage estimation over one environment's trajectory; returns "
        "(advantages, value_targets)");
  m.def("aggregate_json", &aggregate_json, py::arg("scores_json"),
        "Median/IQM/mean/optimality-gap with bootstrap intervals over {task: [scores]} JSON");
  m.def("poi_json", &poi_json, py::arg("method_json"), py::arg("baseline_json"),
        "Probability of improvement of one {task: [scores]} table over another");
  m.def("reference_table_json", &reference_table_json,
        "Built-in per-task score normalization ranges as JSON text");
  m.def("preset_names", &all_preset_names, "Every named preset the binary ships");
  m.def("preset_document_json", [](const std::string& name) { return preset_document(name).dump(); },
        py::arg("name"), "One preset rendered as JSON text");
  m.def("env_ids", &env_ids, "Registered environment ids");
  m.def("sweep_seed", &sweep_seed, py::arg("root_seed"), py::arg("trial"), py::arg("agent"),
        "Derived training seed of one sweep agent");
}
