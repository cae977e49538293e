#pragma once

#include "mgad/corrnet.hpp"

#include <cstddef>
#include <iosfwd>
#include <utility>
#include <vector>

namespace mgad {

struct GraphSummary {
  std::size_t node_count = 0;
  std::size_t edge_count = 0;
  double isolated_fraction = 0.0;
  std::size_t max_degree = 0;
  double mean_degree = 0.0;
  double std_degree = 0.0; // population
  double clustering_coeff = 0.0; // average local clustering, degree < 2 counts as 0

  friend bool operator==(const GraphSummary&, const GraphSummary&) = default;
};

/// Degree per node in asset order.
std::vector<std::size_t> degree_sequence(const MarketGraph& graph);

/// Local clustering per node: closed wedges / possible wedges, 0 below degree 2.
std::vector<double> local_clustering(const MarketGraph& graph);

GraphSummary summarize(const MarketGraph& graph);

/// (rank, degree) with rank 1 the highest degree; ties keep asset order.
std::vector<std::pair<std::size_t, std::size_t>> degree_ranking(const MarketGraph& graph);

/// (degree, count) for every degree that occurs, ascending.
std::vector<std::pair<std::size_t, std::size_t>> degree_distribution(const MarketGraph& graph);

void write_degree_ranking_csv(const MarketGraph& graph, std::ostream& out);
void write_degree_distribution_csv(const MarketGraph& graph, std::ostream& out);

} // namespace mgad
