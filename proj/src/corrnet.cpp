#include "mgad/corrnet.hpp"

#include "mgad/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <tuple>

namespace mgad {

Eigen::MatrixXd MarketGraph::adjacency() const {
  const auto k = static_cast<Eigen::Index>(assets.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(k, k);
  for (const auto& e : edges) {
    a(static_cast<Eigen::Index>(e.i), static_cast<Eigen::Index>(e.j)) = 1.0;
    a(static_cast<Eigen::Index>(e.j), static_cast<Eigen::Index>(e.i)) = 1.0;
  }
  return a;
}

void MarketGraph::add_edge(std::size_t a, std::size_t b, double weight) {
  if (a == b) return;
  Edge e{std::min(a, b), std::max(a, b), weight};
  const auto pos = std::lower_bound(edges.begin(), edges.end(), e, [](const Edge& x, const Edge& y) {
    return std::tie(x.i, x.j) < std::tie(y.i, y.j);
  });
  if (pos != edges.end() && pos->i == e.i && pos->j == e.j) {
    pos->weight = weight;
    return;
  }
  edges.insert(pos, e);
}

Eigen::MatrixXd covariance_matrix(const ReturnsMatrix& panel) {
  if (panel.rows() < 2) throw InsufficientDataError("covariance needs at least 2 rows");
  return covariance(panel.values);
}

CorrelationMatrix correlation_matrix(const ReturnsMatrix& panel) {
  if (panel.rows() < 2) throw InsufficientDataError("correlation needs at least 2 rows");
  Eigen::Index bad = -1;
  CorrelationMatrix out{panel.assets, correlation(panel.values, bad)};
  if (bad >= 0) throw DegenerateAssetError(panel.assets[static_cast<std::size_t>(bad)]);
  return out;
}

double percentile_threshold(const CorrelationMatrix& corr, double percentile) {
  const auto k = corr.rho.rows();
  if (k < 2) throw ShapeError("corrnet", "percentile threshold needs at least 2 assets");
  if (!(percentile > 0.0 && percentile < 100.0))
    throw ConfigError("corrnet", fmt::format("percentile {} outside (0, 100)", percentile));

  std::vector<double> upper;
  upper.reserve(static_cast<std::size_t>(k * (k - 1) / 2));
  for (Eigen::Index u = 0; u < k; ++u)
    for (Eigen::Index v = u + 1; v < k; ++v) upper.push_back(corr.rho(u, v));
  std::sort(upper.begin(), upper.end());

  const double m = static_cast<double>(upper.size());
  double rank = percentile * m / 100.0;
  // p*M/100 is often integral in exact arithmetic; don't let rounding push ceil up a slot.
  if (std::abs(rank - std::round(rank)) < 1e-9) rank = std::round(rank);
  const auto idx = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(rank)), 1, upper.size());
  return upper[idx - 1];
}

MarketGraph build_thresholded_graph(const CorrelationMatrix& corr, double tau) {
  MarketGraph g;
  g.assets = corr.assets;
  const auto k = corr.rho.rows();
  for (Eigen::Index u = 0; u < k; ++u)
    for (Eigen::Index v = u + 1; v < k; ++v)
      if (corr.rho(u, v) >= tau)
        g.edges.push_back({static_cast<std::size_t>(u), static_cast<std::size_t>(v), corr.rho(u, v)});
  return g;
}

double mantegna_distance(double rho) { return std::sqrt(2.0 * std::max(0.0, 1.0 - rho)); }

MarketGraph mst_reduce(const MarketGraph& graph, const EdgeDistance& distance) {
  struct Candidate {
    double d;
    const Edge* e;
  };
  std::vector<Candidate> order;
  order.reserve(graph.edges.size());
  for (const auto& e : graph.edges) order.push_back({distance(e), &e});
  std::sort(order.begin(), order.end(), [](const Candidate& a, const Candidate& b) {
    if (a.d != b.d) return a.d < b.d;
    return std::tie(a.e->i, a.e->j) < std::tie(b.e->i, b.e->j);
  });

  MarketGraph forest;
  forest.assets = graph.assets;
  DisjointSet sets(graph.node_count());
  for (const auto& c : order)
    if (sets.unite(c.e->i, c.e->j)) forest.edges.push_back(*c.e);
  std::sort(forest.edges.begin(), forest.edges.end(),
            [](const Edge& a, const Edge& b) { return std::tie(a.i, a.j) < std::tie(b.i, b.j); });
  return forest;
}

MarketGraph mst_reduce(const MarketGraph& graph) {
  return mst_reduce(graph, [](const Edge& e) { return mantegna_distance(e.weight); });
}

std::vector<std::size_t> connected_components(const MarketGraph& graph) {
  DisjointSet sets(graph.node_count());
  for (const auto& e : graph.edges) sets.unite(e.i, e.j);
  std::vector<std::size_t> label(graph.node_count());
  std::vector<std::size_t> smallest(graph.node_count(), graph.node_count());
  for (std::size_t v = 0; v < graph.node_count(); ++v) {
    auto& s = smallest[sets.find(v)];
    s = std::min(s, v);
  }
  for (std::size_t v = 0; v < graph.node_count(); ++v) label[v] = smallest[sets.find(v)];
  return label;
}

namespace {
std::string dot_id(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + '"';
}
} // namespace

void write_dot(const MarketGraph& graph, std::ostream& out, std::string_view name) {
  out << "graph " << dot_id(name) << " {\n";
  for (const auto& a : graph.assets) out << "  " << dot_id(a) << ";\n";
  for (const auto& e : graph.edges)
    out << "  " << dot_id(graph.assets[e.i]) << " -- " << dot_id(graph.assets[e.j])
        << fmt::format(" [weight={:.6f}];\n", e.weight);
  out << "}\n";
}

} // namespace mgad
