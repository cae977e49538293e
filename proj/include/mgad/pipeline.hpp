#pragma once

#include "mgad/anomaly.hpp"
#include "mgad/autoencoder.hpp"
#include "mgad/config.hpp"
#include "mgad/corrnet.hpp"
#include "mgad/graphstats.hpp"
#include "mgad/stats.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace mgad {

struct PeriodResult {
  PeriodSpec spec;
  std::size_t observations = 0;
  double tau = 0.0;
  GraphSummary thresholded;  // before spanning-forest reduction
  GraphSummary summary;      // graph the autoencoder sees
  MarketGraph graph;
  TrainConfig train;
  TrainTrace trace;
  Eigen::VectorXd reconstruction_errors;
  SweepResult sweep;

  /// Anomaly count per evaluated q, grid order.
  std::vector<double> counts() const;
};

struct AnomalyReport {
  std::string tool_version;
  std::string generated_at; // only non-deterministic field
  PipelineConfig config;
  std::vector<PeriodResult> periods; // config declaration order
  std::vector<TTestResult> ttests;
};

/// Diagnostics sink for recoverable events (skipped q values).
using WarningSink = std::function<void(const std::string&)>;

/// One period: correlation -> threshold -> optional spanning forest -> autoencoder -> q sweep.
PeriodResult analyze_period(const PeriodSpec& spec, const ReturnsMatrix& panel, const PipelineConfig& cfg,
                            const WarningSink& warn = {});

/// Full computation without touching the filesystem beyond reading the input.
/// Errors carry the failing module and period.
AnomalyReport analyze(const PipelineConfig& cfg, const WarningSink& warn = {});

/// analyze() followed by export_outputs() into cfg.output_dir. On failure no
/// output files from this run are left behind.
AnomalyReport run_pipeline(const PipelineConfig& cfg, const WarningSink& warn = {});

nlohmann::json to_json(const AnomalyReport& report);

/// Writes report.json, graph_/degrees_/trace_<period> files, anomalies.csv, sweep.csv, ttests.csv.
std::vector<std::filesystem::path> export_outputs(const AnomalyReport& report, const std::filesystem::path& dir);

} // namespace mgad
