#include "mgad/anomaly.hpp"

#include "mgad/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

namespace mgad {

namespace {

constexpr double kUnitQ = 1e-9;

bool near_unit(double q) { return std::abs(q - 1.0) <= kUnitQ; }

void check_q(const ScoreDistribution& dist, double q) {
  if (!std::isfinite(q)) throw DomainError("q must be finite");
  if (q <= 0.0 && (dist.p.array() == 0.0).any())
    throw DomainError(fmt::format("q = {} is undefined for a zero probability", q));
}

double parse_number(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v))
    throw ConfigError("anomaly", fmt::format("cannot parse '{}' in q grid", s));
  return v;
}

} // namespace

void validate(const ScoreDistribution& dist) {
  if (dist.p.size() == 0) throw DistributionError("empty distribution");
  if (!dist.p.allFinite() || (dist.p.array() < 0.0).any()) throw DistributionError("negative or non-finite probability");
  if (std::abs(dist.p.sum() - 1.0) > 1e-12) throw DistributionError(fmt::format("probabilities sum to {}", dist.p.sum()));
  if (!dist.node_ids.empty() && dist.node_ids.size() != static_cast<std::size_t>(dist.p.size()))
    throw DistributionError("node_ids and p differ in length");
}

double shannon_entropy(const ScoreDistribution& dist) {
  validate(dist);
  double h = 0.0;
  for (double pi : dist.p)
    if (pi > 0.0) h += pi * std::log2(1.0 / pi);
  return h;
}

double shannon_entropy_nats(const ScoreDistribution& dist) {
  validate(dist);
  double h = 0.0;
  for (double pi : dist.p)
    if (pi > 0.0) h -= pi * std::log(pi);
  return h;
}

double tsallis_entropy(const ScoreDistribution& dist, double q) {
  validate(dist);
  check_q(dist, q);
  if (near_unit(q)) return shannon_entropy_nats(dist);
  double sum = 0.0;
  for (double pi : dist.p) sum += (pi == 0.0 ? 0.0 : std::pow(pi, q));
  return (1.0 - sum) / (q - 1.0);
}

ScoreDistribution score_distribution(const Eigen::Ref<const Eigen::VectorXd>& re, std::vector<std::string> node_ids) {
  if (re.size() == 0) throw DegenerateScoreError("no reconstruction errors");
  if (!re.allFinite() || (re.array() < 0.0).any())
    throw DegenerateScoreError("reconstruction errors must be finite and non-negative");
  const double total = re.sum();
  if (!(total > 0.0)) throw DegenerateScoreError("all reconstruction errors are zero");
  if (!node_ids.empty() && node_ids.size() != static_cast<std::size_t>(re.size()))
    throw ShapeError("anomaly", "node_ids and errors differ in length");
  return {std::move(node_ids), re / total};
}

Eigen::VectorXd node_scores(const ScoreDistribution& dist, double q) {
  validate(dist);
  check_q(dist, q);
  Eigen::VectorXd s(dist.p.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double pi = dist.p(i);
    if (near_unit(q))
      s(i) = pi > 0.0 ? -pi * std::log(pi) : 0.0;
    else
      s(i) = (pi - (pi == 0.0 ? 0.0 : std::pow(pi, q))) / (q - 1.0);
  }
  return s;
}

AnomalySet detect(const Eigen::Ref<const Eigen::VectorXd>& scores, const ThresholdRule& rule,
                  const std::vector<std::string>& node_ids) {
  if (!scores.allFinite()) throw DomainError("non-finite anomaly score");
  if (!node_ids.empty() && node_ids.size() != static_cast<std::size_t>(scores.size()))
    throw ShapeError("anomaly", "node_ids and scores differ in length");
  AnomalySet out;
  out.scores = scores;
  if (scores.size() == 0) return out;

  const double n = static_cast<double>(scores.size());
  const double mean = scores.sum() / n;
  const double sd = std::sqrt((scores.array() - mean).square().sum() / n);
  out.threshold = mean + rule.c * sd;

  for (Eigen::Index i = 0; i < scores.size(); ++i)
    if (scores(i) > out.threshold) out.indices.push_back(static_cast<std::size_t>(i));
  std::stable_sort(out.indices.begin(), out.indices.end(), [&](std::size_t a, std::size_t b) {
    return scores(static_cast<Eigen::Index>(a)) > scores(static_cast<Eigen::Index>(b));
  });
  for (auto i : out.indices) out.anomalies.push_back(node_ids.empty() ? std::to_string(i) : node_ids[i]);
  return out;
}

SweepResult sweep_q(const Eigen::Ref<const Eigen::VectorXd>& re, const std::vector<double>& q_grid,
                    const ThresholdRule& rule, const std::vector<std::string>& node_ids) {
  const auto dist = score_distribution(re, node_ids);
  const bool has_zero = (dist.p.array() == 0.0).any();
  SweepResult out;
  for (double q : q_grid) {
    if (q <= 0.0 && has_zero) {
      out.skipped.push_back(q);
      continue;
    }
    auto set = detect(node_scores(dist, q), rule, node_ids);
    set.q = q;
    out.sets.push_back(std::move(set));
  }
  return out;
}

std::vector<double> make_q_grid(double first, double last, double step) {
  if (!(step > 0.0) || !(last >= first) || !std::isfinite(first) || !std::isfinite(last))
    throw ConfigError("anomaly", fmt::format("invalid q grid {}:{}:{}", first, last, step));
  const auto n = static_cast<long>(std::floor((last - first) / step + 1e-9)) + 1;
  if (n > 100000) throw ConfigError("anomaly", "q grid too large");
  std::vector<double> grid;
  for (long i = 0; i < n; ++i) {
    double q = std::round((first + static_cast<double>(i) * step) * 1e10) / 1e10;
    if (q == 0.0) q = 0.0; // drop negative zero
    if (!near_unit(q)) grid.push_back(q);
  }
  return grid;
}

std::vector<double> parse_q_grid(std::string_view text) {
  const auto c1 = text.find(':');
  const auto c2 = c1 == std::string_view::npos ? c1 : text.find(':', c1 + 1);
  if (c2 == std::string_view::npos) throw ConfigError("anomaly", fmt::format("q grid '{}' is not a:b:step", text));
  return make_q_grid(parse_number(text.substr(0, c1)), parse_number(text.substr(c1 + 1, c2 - c1 - 1)),
                     parse_number(text.substr(c2 + 1)));
}

std::vector<double> default_q_grid() { return make_q_grid(-0.5, 0.5, 0.1); }

} // namespace mgad
