// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "eabf/bound.hpp"
#include "eabf/burgers.hpp"
#include "eabf/experiments.hpp"
#include "eabf/model.hpp"
#include "eabf/sampler.hpp"

namespace eabf {

/// Trace CSV: header then one row per sample
/// "iteration,theta_0,...,theta_{d-1},log_posterior".
void write_trace_csv(const std::filesystem::path& path, const Trace& trace);
Trace read_trace_csv(const std::filesystem::path& path);

/// Chain summary: acceptance rate, per-component ESS, MAP, means, wall
/// time, solver statistics, seed and tolerance used.
std::string chain_summary_json(const Trace& trace, std::uint64_t seed,
                               double tolerance);
void write_chain_summary_json(const std::filesystem::path& path,
                              const Trace& trace, std::uint64_t seed,
                              double tolerance);

std::string comparison_report_json(const ComparisonReport& report);
void write_comparison_json(const std::filesystem::path& path,
                           const ComparisonReport& report);

/// Histogram bin table for external plotting: one row per (marginal, bin)
/// with shared edges, "marginal,bin_lo,bin_hi,density_a,density_b".
void write_histograms_csv(const std::filesystem::path& path, const Trace& a,
                          const Trace& b, int bins = 50);

/// Dataset with full provenance (problem, theta_true, sigma, seed).
std::string dataset_json(const Dataset& data, const ExperimentConfig& config);
void write_dataset_json(const std::filesystem::path& path,
                        const Dataset& data, const ExperimentConfig& config);
Dataset read_dataset_json(const std::filesystem::path& path);

std::string tolerance_report_json(const ToleranceReport& report);
void write_tolerance_json(const std::filesystem::path& path,
                          const ToleranceReport& report);

/// Calibration sidecar for the Burgers error model.
std::string calibration_json(const BurgersCalibration& calibration);
void write_calibration_json(const std::filesystem::path& path,
                            const BurgersCalibration& calibration);
BurgersCalibration read_calibration_json(const std::filesystem::path& path);

}  // namespace eabf
