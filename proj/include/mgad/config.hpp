#pragma once

#include "mgad/autoencoder.hpp"
#include "mgad/ingest.hpp"
#include "mgad/synthgen.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mgad {

/// Everything `run` needs. Layer sizes left empty are chosen from the asset count.
struct PipelineConfig {
  std::string input;
  std::string output_dir = "out";
  std::vector<PeriodSpec> periods;
  double percentile = 99.0;
  bool mst = true;
  int epochs = 500;
  double learning_rate = 0.1;
  std::uint64_t seed = 0;
  std::optional<int> hidden_dim;
  std::optional<int> bottleneck_dim;
  std::vector<double> q_grid;
  double detection_c = 2.0;

  /// Training hyperparameters for a panel with `k` assets.
  TrainConfig train_config(int k) const;

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

/// Throws ConfigError on out-of-range values, missing periods or an empty/invalid grid.
void validate(const PipelineConfig& cfg);

/// Key/value document with `[section]` headers; see README for the keys.
/// Relative `input` and `output` paths are resolved against `base_dir` when given.
PipelineConfig parse_pipeline_config(std::istream& in, const std::filesystem::path& base_dir = {});
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

/// Synthetic scenario: top-level `k`, `seed`, `start_date`, one `[regime.<name>]` section per regime.
SynthSpec parse_synth_spec(std::istream& in);
SynthSpec load_synth_spec(const std::filesystem::path& path);

/// Writes `[period.<name>]` sections for each period.
void write_period_sections(const std::vector<PeriodSpec>& periods, std::ostream& out);

nlohmann::json to_json(const PipelineConfig& cfg);
PipelineConfig pipeline_config_from_json(const nlohmann::json& j);

} // namespace mgad
