// SPDX-License-Identifier: Apache-2.0
#include "eabf/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <nlohmann/json.hpp>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace eabf {

namespace {

using nlohmann::json;

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path.string());
  }
  out << std::setprecision(17);
  return out;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open for reading: " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_json(const std::filesystem::path& path, const json& j) {
  open_out(path) << j.dump(2) << '\n';
}

json load_json(const std::filesystem::path& path) {
  return json::parse(slurp(path));
}

json report_to_json(const ToleranceReport& report) {
  return json{{"n", report.n},
              {"sigma_star", report.sigma_star},
              {"correlation_factor", report.correlation_factor},
              {"target_eabf", report.target_eabf},
              {"k_constant", report.k_constant},
              {"k0_admissible", report.k0_admissible}};
}

}  // namespace

void write_trace_csv(const std::filesystem::path& path, const Trace& trace) {
  std::ofstream out = open_out(path);
  out << "iteration";
  for (std::size_t j = 0; j < trace.dim; ++j) out << ",theta_" << j;
  out << ",log_posterior\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out << i;
    for (std::size_t j = 0; j < trace.dim; ++j) {
      out << ',' << trace.component(i, j);
    }
    out << ',' << trace.log_posts[i] << '\n';
  }
}

Trace read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open for reading: " + path.string());
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("empty trace file: " + path.string());
  }
  const std::size_t columns =
      1 + static_cast<std::size_t>(
              std::count(line.begin(), line.end(), ','));
  if (columns < 3) {
    throw std::runtime_error("malformed trace header: " + path.string());
  }
  Trace trace;
  trace.dim = columns - 2;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::vector<double> values;
    while (std::getline(row, cell, ',')) {
      values.push_back(std::stod(cell));
    }
    if (values.size() != columns) {
      throw std::runtime_error("malformed trace row: " + path.string());
    }
    for (std::size_t j = 0; j < trace.dim; ++j) {
      trace.samples.push_back(values[1 + j]);
    }
    trace.log_posts.push_back(values.back());
  }
  return trace;
}

namespace {

json chain_summary_to_json(const Trace& trace, std::uint64_t seed,
                           double tolerance) {
  json j;
  j["samples"] = trace.size();
  j["dim"] = trace.dim;
  j["seed"] = seed;
  j["tolerance"] = tolerance;
  j["acceptance_rate"] = trace.acceptance_rate;
  j["wall_seconds"] = trace.wall_seconds;
  j["solver"] = {{"n_evaluations", trace.solver.n_evaluations},
                 {"n_adaptations", trace.solver.n_adaptations},
                 {"n_tolerance_unmet", trace.solver.n_tolerance_unmet},
                 {"unmet_rate", trace.solver.unmet_rate()}};
  if (trace.size() > 0) {
    const std::vector<double> map = map_estimate(trace);
    std::vector<double> means(trace.dim, 0.0);
    for (std::size_t i = 0; i < trace.size(); ++i) {
      for (std::size_t k = 0; k < trace.dim; ++k) {
        means[k] += trace.component(i, k);
      }
    }
    for (double& m : means) m /= static_cast<double>(trace.size());
    j["map"] = map;
    j["means"] = means;
    if (trace.size() >= 100) {
      std::vector<double> ess(trace.dim, 0.0);
      for (std::size_t k = 0; k < trace.dim; ++k) {
        ess[k] = effective_sample_size(trace, k);
      }
      j["ess"] = ess;
    }
  }
  return j;
}

json comparison_to_json(const ComparisonReport& report) {
  json marginals = json::array();
  for (const MarginalComparison& m : report.marginals) {
    marginals.push_back({{"tv", m.tv},
                         {"mean_delta_sd", m.mean_delta_sd},
                         {"map_delta_sd", m.map_delta_sd}});
  }
  json j;
  j["marginals"] = marginals;
  j["bins"] = report.bins;
  j["wall_ratio"] = report.wall_ratio;
  j["tolerance_used"] = report.tolerance_used;
  j["bound"] = report_to_json(report.bound);
  j["fine_bound_violating"] = report.fine_bound_violating;
  j["adaptive_bound_violating"] = report.adaptive_bound_violating;
  return j;
}

json dataset_to_json(const Dataset& data, const ExperimentConfig& config) {
  json points = json::array();
  for (std::size_t i = 0; i < data.locations.size(); ++i) {
    points.push_back(data.locations.point(i));
  }
  json j;
  j["y"] = std::vector<double>(data.y.data(), data.y.data() + data.y.size());
  j["locations"] = points;
  j["problem"] =
      config.problem == ProblemKind::logistic ? "logistic" : "burgers";
  j["theta_true"] = config.theta_true;
  j["sigma"] = config.sigma;
  j["seed"] = config.seed;
  return j;
}

json calibration_to_json(const BurgersCalibration& calibration) {
  json points = json::array();
  for (const RatioFitPoint& p : calibration.points) {
    points.push_back({{"n_cells", p.n_cells},
                      {"dz", p.dz},
                      {"phi", p.phi},
                      {"err_l1", p.err_l1},
                      {"ratio", p.ratio},
                      {"err_obs_max", p.err_obs_max}});
  }
  json j;
  j["points"] = points;
  j["k0_ratio_growth"] = calibration.k0_ratio_growth;
  j["k0_ratio_dz2"] = calibration.k0_ratio_dz2;
  j["k0_obs"] = calibration.k0_obs;
  j["t_end"] = calibration.t_end;
  j["z1"] = calibration.z1;
  return j;
}

}  // namespace

std::string chain_summary_json(const Trace& trace, std::uint64_t seed,
                               double tolerance) {
  return chain_summary_to_json(trace, seed, tolerance).dump(2);
}

void write_chain_summary_json(const std::filesystem::path& path,
                              const Trace& trace, std::uint64_t seed,
                              double tolerance) {
  write_json(path, chain_summary_to_json(trace, seed, tolerance));
}

std::string comparison_report_json(const ComparisonReport& report) {
  return comparison_to_json(report).dump(2);
}

void write_comparison_json(const std::filesystem::path& path,
                           const ComparisonReport& report) {
  write_json(path, comparison_to_json(report));
}

void write_histograms_csv(const std::filesystem::path& path, const Trace& a,
                          const Trace& b, int bins) {
  if (a.dim != b.dim || a.dim == 0 || a.size() == 0 || b.size() == 0) {
    throw std::invalid_argument("write_histograms_csv: incompatible traces");
  }
  if (bins < 1) {
    throw std::invalid_argument("write_histograms_csv: bins must be >= 1");
  }
  std::ofstream out = open_out(path);
  out << "marginal,bin_lo,bin_hi,density_a,density_b\n";
  for (std::size_t j = 0; j < a.dim; ++j) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < a.size(); ++i) {
      lo = std::min(lo, a.component(i, j));
      hi = std::max(hi, a.component(i, j));
    }
    for (std::size_t i = 0; i < b.size(); ++i) {
      lo = std::min(lo, b.component(i, j));
      hi = std::max(hi, b.component(i, j));
    }
    const double width = (hi - lo) / bins;
    std::vector<double> da(static_cast<std::size_t>(bins), 0.0);
    std::vector<double> db(static_cast<std::size_t>(bins), 0.0);
    const auto bin_of = [&](double v) {
      const int k = width > 0.0 ? static_cast<int>((v - lo) / width) : 0;
      return static_cast<std::size_t>(std::clamp(k, 0, bins - 1));
    };
    for (std::size_t i = 0; i < a.size(); ++i) {
      da[bin_of(a.component(i, j))] += 1.0;
    }
    for (std::size_t i = 0; i < b.size(); ++i) {
      db[bin_of(b.component(i, j))] += 1.0;
    }
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    for (int k = 0; k < bins; ++k) {
      const double bin_lo = lo + k * width;
      const double bin_hi = k + 1 == bins ? hi : lo + (k + 1) * width;
      const double scale_a = width > 0.0 ? 1.0 / (na * width) : 1.0 / na;
      const double scale_b = width > 0.0 ? 1.0 / (nb * width) : 1.0 / nb;
      out << j << ',' << bin_lo << ',' << bin_hi << ','
          << da[static_cast<std::size_t>(k)] * scale_a << ','
          << db[static_cast<std::size_t>(k)] * scale_b << '\n';
    }
  }
}

std::string dataset_json(const Dataset& data,
                         const ExperimentConfig& config) {
  return dataset_to_json(data, config).dump(2);
}

void write_dataset_json(const std::filesystem::path& path,
                        const Dataset& data, const ExperimentConfig& config) {
  write_json(path, dataset_to_json(data, config));
}

Dataset read_dataset_json(const std::filesystem::path& path) {
  const json j = load_json(path);
  const std::vector<double> y = j.at("y").get<std::vector<double>>();
  const auto points =
      j.at("locations").get<std::vector<std::vector<double>>>();
  Dataset data{Vector::Map(y.data(), static_cast<Eigen::Index>(y.size())),
               Locations(points)};
  data.validate();
  return data;
}

std::string tolerance_report_json(const ToleranceReport& report) {
  return report_to_json(report).dump(2);
}

void write_tolerance_json(const std::filesystem::path& path,
                          const ToleranceReport& report) {
  write_json(path, report_to_json(report));
}

std::string calibration_json(const BurgersCalibration& calibration) {
  return calibration_to_json(calibration).dump(2);
}

void write_calibration_json(const std::filesystem::path& path,
                            const BurgersCalibration& calibration) {
  write_json(path, calibration_to_json(calibration));
}

BurgersCalibration read_calibration_json(const std::filesystem::path& path) {
  const json j = load_json(path);
  BurgersCalibration calibration;
  for (const json& p : j.at("points")) {
    RatioFitPoint point;
    point.n_cells = p.at("n_cells").get<int>();
    point.dz = p.at("dz").get<double>();
    point.phi = p.at("phi").get<double>();
    point.err_l1 = p.at("err_l1").get<double>();
    point.ratio = p.at("ratio").get<double>();
    point.err_obs_max = p.at("err_obs_max").get<double>();
    calibration.points.push_back(point);
  }
  calibration.k0_ratio_growth = j.at("k0_ratio_growth").get<double>();
  calibration.k0_ratio_dz2 = j.at("k0_ratio_dz2").get<double>();
  calibration.k0_obs = j.at("k0_obs").get<double>();
  calibration.t_end = j.at("t_end").get<double>();
  calibration.z1 = j.at("z1").get<double>();
  return calibration;
}

}  // namespace eabf
