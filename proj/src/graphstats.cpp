#include "mgad/graphstats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>

namespace mgad {

std::vector<std::size_t> degree_sequence(const MarketGraph& graph) {
  std::vector<std::size_t> deg(graph.node_count(), 0);
  for (const auto& e : graph.edges) {
    ++deg[e.i];
    ++deg[e.j];
  }
  return deg;
}

std::vector<double> local_clustering(const MarketGraph& graph) {
  const std::size_t n = graph.node_count();
  std::vector<std::vector<std::size_t>> nbrs(n);
  for (const auto& e : graph.edges) {
    nbrs[e.i].push_back(e.j);
    nbrs[e.j].push_back(e.i);
  }
  for (auto& l : nbrs) std::sort(l.begin(), l.end());

  std::vector<double> c(n, 0.0);
  for (std::size_t v = 0; v < n; ++v) {
    const auto& nv = nbrs[v];
    const std::size_t d = nv.size();
    if (d < 2) continue;
    std::size_t links = 0;
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = a + 1; b < d; ++b)
        if (std::binary_search(nbrs[nv[a]].begin(), nbrs[nv[a]].end(), nv[b])) ++links;
    c[v] = static_cast<double>(links) / (static_cast<double>(d * (d - 1)) / 2.0);
  }
  return c;
}

GraphSummary summarize(const MarketGraph& graph) {
  GraphSummary s;
  s.node_count = graph.node_count();
  s.edge_count = graph.edge_count();
  if (s.node_count == 0) return s;

  const auto deg = degree_sequence(graph);
  const double n = static_cast<double>(s.node_count);
  s.isolated_fraction = static_cast<double>(std::count(deg.begin(), deg.end(), 0)) / n;
  s.max_degree = *std::max_element(deg.begin(), deg.end());
  s.mean_degree = 2.0 * static_cast<double>(s.edge_count) / n;
  double ss = 0.0;
  for (auto d : deg) ss += (static_cast<double>(d) - s.mean_degree) * (static_cast<double>(d) - s.mean_degree);
  s.std_degree = std::sqrt(ss / n);

  const auto c = local_clustering(graph);
  s.clustering_coeff = std::accumulate(c.begin(), c.end(), 0.0) / n;
  return s;
}

std::vector<std::pair<std::size_t, std::size_t>> degree_ranking(const MarketGraph& graph) {
  auto deg = degree_sequence(graph);
  std::stable_sort(deg.begin(), deg.end(), std::greater<>());
  std::vector<std::pair<std::size_t, std::size_t>> out;
  out.reserve(deg.size());
  for (std::size_t r = 0; r < deg.size(); ++r) out.emplace_back(r + 1, deg[r]);
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> degree_distribution(const MarketGraph& graph) {
  std::map<std::size_t, std::size_t> hist;
  for (auto d : degree_sequence(graph)) ++hist[d];
  return {hist.begin(), hist.end()};
}

void write_degree_ranking_csv(const MarketGraph& graph, std::ostream& out) {
  out << "rank,degree\n";
  for (const auto& [r, d] : degree_ranking(graph)) out << r << ',' << d << '\n';
}

void write_degree_distribution_csv(const MarketGraph& graph, std::ostream& out) {
  out << "degree,count\n";
  for (const auto& [d, c] : degree_distribution(graph)) out << d << ',' << c << '\n';
}

} // namespace mgad
