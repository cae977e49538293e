#pragma once

#include "mgad/ingest.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <numeric>
#include <string>
#include <vector>

namespace mgad {

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Population covariance (divisor T) of the columns of `x`.
///
/// Each entry is accumulated over rows in order, once per unordered pair, and
/// mirrored into the lower triangle, so the result is exactly symmetric and
/// independent of how Eigen would block a GEMM.
template <typename Derived>
DenseMatrix<typename Derived::Scalar> covariance(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index T = x.rows(), k = x.cols();
  const DenseMatrix<Scalar> centered = x.rowwise() - x.colwise().mean();
  DenseMatrix<Scalar> cov(k, k);
  for (Eigen::Index u = 0; u < k; ++u) {
    for (Eigen::Index v = u; v < k; ++v) {
      Scalar acc(0);
      for (Eigen::Index t = 0; t < T; ++t) acc += centered(t, u) * centered(t, v);
      cov(u, v) = cov(v, u) = acc / static_cast<Scalar>(T);
    }
  }
  return cov;
}

/// Pearson correlation of the columns of `x`; diagonal is exactly one and
/// off-diagonal entries are clamped into [-1, 1]. Returns the index of the first
/// zero-variance column through `degenerate` (or -1) instead of dividing by zero.
template <typename Derived>
DenseMatrix<typename Derived::Scalar> correlation(const Eigen::MatrixBase<Derived>& x, Eigen::Index& degenerate) {
  using Scalar = typename Derived::Scalar;
  DenseMatrix<Scalar> rho = covariance(x);
  const Eigen::Index k = rho.rows();
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> sd = rho.diagonal().cwiseSqrt();
  degenerate = -1;
  for (Eigen::Index u = 0; u < k; ++u) {
    if (!(sd(u) > Scalar(0))) {
      degenerate = u;
      return rho;
    }
  }
  for (Eigen::Index u = 0; u < k; ++u) {
    rho(u, u) = Scalar(1);
    for (Eigen::Index v = u + 1; v < k; ++v) {
      Scalar r = rho(u, v) / (sd(u) * sd(v));
      r = std::clamp(r, Scalar(-1), Scalar(1));
      rho(u, v) = rho(v, u) = r;
    }
  }
  return rho;
}

struct CorrelationMatrix {
  std::vector<std::string> assets;
  Eigen::MatrixXd rho;

  std::size_t size() const { return assets.size(); }
};

/// Undirected weighted edge; always stored with i < j.
struct Edge {
  std::size_t i = 0;
  std::size_t j = 0;
  double weight = 0.0; // correlation

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Undirected graph over asset nodes. Edges are kept sorted by (i, j) and carry
/// the correlation between their endpoints.
struct MarketGraph {
  std::vector<std::string> assets;
  std::vector<Edge> edges;

  std::size_t node_count() const { return assets.size(); }
  std::size_t edge_count() const { return edges.size(); }

  /// Binary k x k adjacency matrix.
  Eigen::MatrixXd adjacency() const;
  /// Adds an edge, normalizing endpoint order; keeps `edges` sorted.
  void add_edge(std::size_t a, std::size_t b, double weight);

  friend bool operator==(const MarketGraph&, const MarketGraph&) = default;
};

/// Disjoint-set forest with union by size and path halving.
class DisjointSet {
public:
  explicit DisjointSet(std::size_t n) : parent_(n), size_(n, 1) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  /// False if `a` and `b` were already connected.
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    return true;
  }

  std::size_t component_size(std::size_t x) { return size_[find(x)]; }

private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

Eigen::MatrixXd covariance_matrix(const ReturnsMatrix& panel);

/// Throws DegenerateAssetError naming the first zero-variance asset.
CorrelationMatrix correlation_matrix(const ReturnsMatrix& panel);

/// Nearest-rank percentile of the strictly-upper-triangle correlations.
double percentile_threshold(const CorrelationMatrix& corr, double percentile);

/// Edge (u, v) iff corr(u, v) >= tau, u != v.
MarketGraph build_thresholded_graph(const CorrelationMatrix& corr, double tau);

/// sqrt(2 (1 - rho)).
double mantegna_distance(double rho);

using EdgeDistance = std::function<double(const Edge&)>;

/// Kruskal spanning forest under `distance`. Ties are broken by (i, j).
MarketGraph mst_reduce(const MarketGraph& graph, const EdgeDistance& distance);

/// Spanning forest under the Mantegna distance.
MarketGraph mst_reduce(const MarketGraph& graph);

/// Component label per node (smallest node index in the component).
std::vector<std::size_t> connected_components(const MarketGraph& graph);

/// Undirected DOT, node IDs are asset labels, `weight` is the correlation to 6 decimals.
void write_dot(const MarketGraph& graph, std::ostream& out, std::string_view name = "market");

} // namespace mgad
