// SPDX-License-Identifier: Apache-2.0
#include "eabf/config.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace eabf {

namespace {

using nlohmann::json;

void require_keys(const json& j, const std::string& where,
                  const std::set<std::string>& allowed) {
  if (!j.is_object()) {
    throw std::invalid_argument("config: " + where + " must be an object");
  }
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) {
      throw std::invalid_argument("config: unknown key \"" + key + "\" in " +
                                  where);
    }
  }
}

PriorComponent parse_prior_component(const json& j) {
  require_keys(j, "prior component", {"family", "a", "b"});
  const std::string family = j.at("family").get<std::string>();
  const double a = j.at("a").get<double>();
  const double b = j.at("b").get<double>();
  if (family == "uniform") return PriorComponent::uniform(a, b);
  if (family == "gamma") return PriorComponent::gamma(a, b);
  if (family == "normal") return PriorComponent::normal(a, b);
  throw std::invalid_argument("config: unknown prior family \"" + family +
                              "\"");
}

json prior_component_json(const PriorComponent& c) {
  const char* family = "uniform";
  switch (c.family) {
    case PriorComponent::Family::uniform: family = "uniform"; break;
    case PriorComponent::Family::gamma: family = "gamma"; break;
    case PriorComponent::Family::normal: family = "normal"; break;
  }
  return json{{"family", family}, {"a", c.a}, {"b", c.b}};
}

PrecisionSpec parse_precision(const json& j) {
  require_keys(j, "precision", {"kind", "rho", "length_scale"});
  PrecisionSpec spec;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "identity") {
    spec.kind = PrecisionSpec::Kind::identity;
  } else if (kind == "isotropic") {
    spec.kind = PrecisionSpec::Kind::isotropic;
  } else {
    throw std::invalid_argument("config: unknown precision kind \"" + kind +
                                "\"");
  }
  if (j.contains("rho")) {
    const std::string rho = j.at("rho").get<std::string>();
    if (rho == "exponential") {
      spec.rho = CorrelationKind::exponential;
    } else if (rho == "squared_exponential") {
      spec.rho = CorrelationKind::squared_exponential;
    } else {
      throw std::invalid_argument("config: unknown correlation \"" + rho +
                                  "\"");
    }
  }
  if (j.contains("length_scale")) {
    spec.length_scale = j.at("length_scale").get<double>();
  }
  return spec;
}

json precision_json(const PrecisionSpec& spec) {
  json j;
  j["kind"] =
      spec.kind == PrecisionSpec::Kind::identity ? "identity" : "isotropic";
  if (spec.kind == PrecisionSpec::Kind::isotropic) {
    j["rho"] = spec.rho == CorrelationKind::exponential
                   ? "exponential"
                   : "squared_exponential";
    j["length_scale"] = spec.length_scale;
  }
  return j;
}

std::vector<double> parse_observation_times(const json& root) {
  if (root.contains("observation_times") && root.contains("observations")) {
    throw std::invalid_argument(
        "config: give observation_times or observations, not both");
  }
  if (root.contains("observation_times")) {
    return root.at("observation_times").get<std::vector<double>>();
  }
  if (root.contains("observations")) {
    const json& j = root.at("observations");
    require_keys(j, "observations", {"from", "to", "count"});
    const double from = j.at("from").get<double>();
    const double to = j.at("to").get<double>();
    const long long count = j.at("count").get<long long>();
    if (count < 2 || !(to > from)) {
      throw std::invalid_argument("config: bad observations range");
    }
    std::vector<double> times(static_cast<std::size_t>(count));
    for (long long i = 0; i < count; ++i) {
      times[static_cast<std::size_t>(i)] =
          from + (to - from) * static_cast<double>(i) /
                     static_cast<double>(count - 1);
    }
    return times;
  }
  throw std::invalid_argument(
      "config: observation_times or observations required");
}

void parse_solver(const json& j, SolverSettings& s) {
  require_keys(j, "solver",
               {"fine_h", "h_init", "max_halvings", "fine_n", "n_start",
                "n_max", "cfl", "calibration_grids", "calibrated_k0",
                "tolerance_override"});
  if (j.contains("fine_h")) s.fine_h = j.at("fine_h").get<double>();
  if (j.contains("h_init")) s.h_init = j.at("h_init").get<double>();
  if (j.contains("max_halvings")) {
    s.max_halvings = j.at("max_halvings").get<int>();
  }
  if (j.contains("fine_n")) s.fine_n = j.at("fine_n").get<int>();
  if (j.contains("n_start")) s.n_start = j.at("n_start").get<int>();
  if (j.contains("n_max")) s.n_max = j.at("n_max").get<int>();
  if (j.contains("cfl")) s.cfl = j.at("cfl").get<double>();
  if (j.contains("calibration_grids")) {
    s.calibration_grids =
        j.at("calibration_grids").get<std::vector<int>>();
  }
  if (j.contains("calibrated_k0")) {
    s.calibrated_k0 = j.at("calibrated_k0").get<double>();
  }
  if (j.contains("tolerance_override")) {
    s.tolerance_override = j.at("tolerance_override").get<double>();
  }
}

void parse_burgers(const json& j, ExperimentConfig& config) {
  require_keys(j, "burgers", {"u_left", "viscosity", "z1", "cfl"});
  if (j.contains("u_left")) {
    config.solver.u_left = j.at("u_left").get<double>();
  }
  if (j.contains("viscosity")) {
    config.solver.viscosity = j.at("viscosity").get<double>();
  }
  if (j.contains("z1")) config.solver.z1 = j.at("z1").get<double>();
  if (j.contains("cfl")) config.solver.cfl = j.at("cfl").get<double>();
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  const json root = json::parse(json_text);
  require_keys(root, "config",
               {"problem", "theta_true", "sigma", "seed", "target_eabf",
                "target_accept", "iterations", "burn_in", "initial",
                "initial_scales",
                "observation_times", "observations", "prior", "precision",
                "logistic", "burgers", "solver", "out_dir"});

  ExperimentConfig config;
  const std::string problem = root.at("problem").get<std::string>();
  if (problem == "logistic") {
    config.problem = ProblemKind::logistic;
  } else if (problem == "burgers") {
    config.problem = ProblemKind::burgers;
  } else {
    throw std::invalid_argument("config: unknown problem \"" + problem +
                                "\"");
  }
  config.theta_true = root.at("theta_true").get<std::vector<double>>();
  if (root.contains("sigma")) config.sigma = root.at("sigma").get<double>();
  if (root.contains("seed")) {
    config.seed = root.at("seed").get<std::uint64_t>();
  }
  if (root.contains("target_eabf")) {
    config.target_eabf = root.at("target_eabf").get<double>();
  }
  if (root.contains("target_accept")) {
    config.target_accept = root.at("target_accept").get<double>();
  }
  if (root.contains("iterations")) {
    config.iterations = root.at("iterations").get<long long>();
  }
  if (root.contains("burn_in")) {
    config.burn_in = root.at("burn_in").get<long long>();
  }
  if (root.contains("initial")) {
    config.initial = root.at("initial").get<std::vector<double>>();
  }
  if (root.contains("initial_scales")) {
    config.initial_scales =
        root.at("initial_scales").get<std::vector<double>>();
  }
  config.obs_times = parse_observation_times(root);
  json prior = root.at("prior");
  if (!prior.is_array()) {
    throw std::invalid_argument("config: prior must be an array");
  }
  for (const json& c : prior) {
    config.prior.components.push_back(parse_prior_component(c));
  }
  if (root.contains("precision")) {
    config.precision = parse_precision(root.at("precision"));
  }
  if (root.contains("logistic")) {
    require_keys(root.at("logistic"), "logistic", {"x0"});
    if (root.at("logistic").contains("x0")) {
      config.x0 = root.at("logistic").at("x0").get<double>();
    }
  }
  if (root.contains("burgers")) parse_burgers(root.at("burgers"), config);
  if (root.contains("solver")) parse_solver(root.at("solver"), config.solver);
  if (root.contains("out_dir")) {
    config.out_dir = root.at("out_dir").get<std::string>();
  }
  config.validate();
  return config;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open config: " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_experiment_config(buffer.str());
}

std::string experiment_config_json(const ExperimentConfig& config) {
  json j;
  j["problem"] =
      config.problem == ProblemKind::logistic ? "logistic" : "burgers";
  j["theta_true"] = config.theta_true;
  j["sigma"] = config.sigma;
  j["seed"] = config.seed;
  j["target_eabf"] = config.target_eabf;
  j["target_accept"] = config.target_accept;
  j["iterations"] = config.iterations;
  j["burn_in"] = config.burn_in;
  if (!config.initial.empty()) j["initial"] = config.initial;
  if (!config.initial_scales.empty()) {
    j["initial_scales"] = config.initial_scales;
  }
  j["observation_times"] = config.obs_times;
  json prior = json::array();
  for (const PriorComponent& c : config.prior.components) {
    prior.push_back(prior_component_json(c));
  }
  j["prior"] = prior;
  j["precision"] = precision_json(config.precision);
  if (config.problem == ProblemKind::logistic) {
    j["logistic"] = {{"x0", config.x0}};
  } else {
    j["burgers"] = {{"u_left", config.solver.u_left},
                    {"viscosity", config.solver.viscosity},
                    {"z1", config.solver.z1},
                    {"cfl", config.solver.cfl}};
  }
  j["solver"] = {{"fine_h", config.solver.fine_h},
                 {"h_init", config.solver.h_init},
                 {"max_halvings", config.solver.max_halvings},
                 {"fine_n", config.solver.fine_n},
                 {"n_start", config.solver.n_start},
                 {"n_max", config.solver.n_max},
                 {"calibration_grids", config.solver.calibration_grids},
                 {"calibrated_k0", config.solver.calibrated_k0},
                 {"tolerance_override", config.solver.tolerance_override}};
  if (!config.out_dir.empty()) j["out_dir"] = config.out_dir.string();
  return j.dump(2);
}

void save_experiment_config(const std::filesystem::path& path,
                            const ExperimentConfig& config) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path.string());
  }
  out << experiment_config_json(config) << '\n';
}

}  // namespace eabf
