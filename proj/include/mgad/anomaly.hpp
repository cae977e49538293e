#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace mgad {

/// Discrete distribution over nodes. p >= 0, sum p = 1 within 1e-12.
struct ScoreDistribution {
  std::vector<std::string> node_ids;
  Eigen::VectorXd p;
};

/// Throws DistributionError unless `p` is a probability vector.
void validate(const ScoreDistribution& dist);

/// Shannon entropy in bits: sum p log2(1/p), zero terms contribute 0.
double shannon_entropy(const ScoreDistribution& dist);

/// Shannon entropy in nats; the q -> 1 limit of the Tsallis entropy.
double shannon_entropy_nats(const ScoreDistribution& dist);

/// Tsallis entropy (1 - sum p^q) / (q - 1). Within 1e-9 of q = 1 the natural-log
/// Shannon limit is returned. Throws DomainError for q <= 0 with a zero probability.
double tsallis_entropy(const ScoreDistribution& dist, double q);

/// p_i = re_i / sum re. Throws DegenerateScoreError when every error is zero.
ScoreDistribution score_distribution(const Eigen::Ref<const Eigen::VectorXd>& re,
                                     std::vector<std::string> node_ids = {});

/// Per-node summand of the Tsallis entropy, (p_i - p_i^q) / (q - 1); -p_i ln p_i near q = 1.
Eigen::VectorXd node_scores(const ScoreDistribution& dist, double q);

/// mean(scores) + c * std(scores) with population std.
struct ThresholdRule {
  double c = 2.0;
};

struct AnomalySet {
  double q = 0.0;
  double threshold = 0.0;
  std::vector<std::size_t> indices; // descending score, ties by index
  std::vector<std::string> anomalies;
  Eigen::VectorXd scores;

  std::size_t count() const { return indices.size(); }
};

AnomalySet detect(const Eigen::Ref<const Eigen::VectorXd>& scores, const ThresholdRule& rule = {},
                  const std::vector<std::string>& node_ids = {});

struct SweepResult {
  std::vector<AnomalySet> sets; // grid order
  std::vector<double> skipped;  // q <= 0 values dropped because some p_i = 0
};

SweepResult sweep_q(const Eigen::Ref<const Eigen::VectorXd>& re, const std::vector<double>& q_grid,
                    const ThresholdRule& rule = {}, const std::vector<std::string>& node_ids = {});

/// Inclusive arithmetic grid from `a:b:step`, snapped to 1e-10, with q = 1 removed.
std::vector<double> parse_q_grid(std::string_view text);
std::vector<double> make_q_grid(double first, double last, double step);

/// -0.5, -0.4, ..., 0.5
std::vector<double> default_q_grid();

} // namespace mgad
