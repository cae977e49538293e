#include "mgad/corrnet.hpp"
#include "mgad/error.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>
#include <map>
#include <set>
#include <sstream>

using namespace mgad;

namespace {

ReturnsMatrix panel_from(const Eigen::MatrixXd& values) {
  ReturnsMatrix p;
  p.values = values;
  for (Eigen::Index t = 0; t < values.rows(); ++t) p.dates.push_back("d" + std::to_string(t));
  for (Eigen::Index j = 0; j < values.cols(); ++j) p.assets.push_back("X" + std::to_string(j));
  return p;
}

Eigen::MatrixXd random_panel(std::mt19937_64& rng, int T, int k) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd x(T, k);
  for (int t = 0; t < T; ++t)
    for (int j = 0; j < k; ++j) x(t, j) = n(rng);
  return x;
}

CorrelationMatrix corr_from_upper(const std::vector<double>& upper, int k) {
  CorrelationMatrix c;
  c.rho = Eigen::MatrixXd::Identity(k, k);
  std::size_t at = 0;
  for (int u = 0; u < k; ++u)
    for (int v = u + 1; v < k; ++v) c.rho(u, v) = c.rho(v, u) = upper[at++];
  for (int u = 0; u < k; ++u) c.assets.push_back("N" + std::to_string(u));
  return c;
}

MarketGraph graph_with(std::size_t n, const std::vector<Edge>& edges) {
  MarketGraph g;
  for (std::size_t i = 0; i < n; ++i) g.assets.push_back("v" + std::to_string(i));
  for (const auto& e : edges) g.add_edge(e.i, e.j, e.weight);
  return g;
}

bool acyclic(const MarketGraph& g) {
  DisjointSet s(g.node_count());
  for (const auto& e : g.edges)
    if (!s.unite(e.i, e.j)) return false;
  return true;
}

std::size_t forest_edge_law(const MarketGraph& g) {
  const auto comp = connected_components(g);
  std::map<std::size_t, std::size_t> sizes;
  for (auto c : comp) ++sizes[c];
  std::size_t expected = 0;
  for (const auto& [c, n] : sizes) expected += n - 1;
  return expected;
}

} // namespace

TEST(Covariance, HandEvaluatedExamples) {
  Eigen::MatrixXd x(3, 2);
  x << 1, 1, 2, 2, 3, 3;
  EXPECT_NEAR(covariance_matrix(panel_from(x))(0, 1), 2.0 / 3.0, 1e-15);

  Eigen::MatrixXd c(3, 1);
  c << 5, 5, 5;
  EXPECT_EQ(covariance_matrix(panel_from(c))(0, 0), 0.0);

  Eigen::MatrixXd y(2, 2);
  y << 1, -1, -1, 1;
  EXPECT_DOUBLE_EQ(covariance_matrix(panel_from(y))(0, 1), -1.0);
}

TEST(Covariance, TemplatedOnScalar) {
  Eigen::MatrixXf x(3, 2);
  x << 1, 1, 2, 2, 3, 3;
  const Eigen::MatrixXf cov = covariance(x);
  EXPECT_NEAR(cov(0, 1), 2.0f / 3.0f, 1e-6f);
}

TEST(Correlation, PerfectDependence) {
  Eigen::MatrixXd x(3, 3);
  x << 1, 2, 3, 2, 4, 2, 3, 6, 1;
  const auto c = correlation_matrix(panel_from(x));
  EXPECT_DOUBLE_EQ(c.rho(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(c.rho(0, 2), -1.0);
}

TEST(Correlation, MatchesDirectFormulaWithOutlier) {
  Eigen::MatrixXd x(4, 2);
  x << 1, 1, 2, 2, 3, 3, 4, 100;
  const auto c = correlation_matrix(panel_from(x));
  EXPECT_NEAR(c.rho(0, 1), oracle::correlation(x, 0, 1), 1e-12);
  // frozen from a 40-digit evaluation of the definitions
  EXPECT_NEAR(c.rho(0, 1), 0.78502642096301005, 1e-12);
}

TEST(Correlation, ZeroVarianceNamesAsset) {
  Eigen::MatrixXd x(3, 2);
  x << 1, 5, 2, 5, 3, 5;
  try {
    correlation_matrix(panel_from(x));
    FAIL();
  } catch (const DegenerateAssetError& e) {
    EXPECT_EQ(e.asset, "X1");
  }
}

TEST(Correlation, SymmetricUnitDiagonalOnRandomPanels) {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 100; ++rep) {
    const auto x = random_panel(rng, 30, 8);
    const auto c = correlation_matrix(panel_from(x));
    ASSERT_TRUE(c.rho.allFinite());
    ASSERT_TRUE((c.rho.array() >= -1.0).all() && (c.rho.array() <= 1.0).all());
    for (int u = 0; u < 8; ++u) {
      ASSERT_EQ(c.rho(u, u), 1.0);
      for (int v = 0; v < 8; ++v) ASSERT_EQ(c.rho(u, v), c.rho(v, u));
    }
  }
}

TEST(Correlation, InvariantUnderPositiveAffineMaps) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> scale(0.1, 10.0), shift(-5.0, 5.0);
  for (int rep = 0; rep < 50; ++rep) {
    auto x = random_panel(rng, 40, 5);
    const auto before = correlation_matrix(panel_from(x));
    x.col(2) = (x.col(2).array() * scale(rng) + shift(rng)).matrix();
    const auto after = correlation_matrix(panel_from(x));
    EXPECT_LT((before.rho - after.rho).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Percentile, NearestRankExamples) {
  EXPECT_DOUBLE_EQ(percentile_threshold(corr_from_upper({0.3, 0.1, 0.5, 0.2, 1.0, 0.4, 0.9, 0.6, 0.8, 0.7}, 5), 90),
                   0.9);
  EXPECT_DOUBLE_EQ(percentile_threshold(corr_from_upper({0.5, 0.5, 0.5}, 3), 37), 0.5);
  EXPECT_DOUBLE_EQ(percentile_threshold(corr_from_upper({-0.2}, 2), 99), -0.2);
  EXPECT_DOUBLE_EQ(percentile_threshold(corr_from_upper({-0.2}, 2), 1), -0.2);
}

TEST(Percentile, RejectsOutOfRange) {
  const auto c = corr_from_upper({0.1, 0.2, 0.3}, 3);
  EXPECT_THROW(percentile_threshold(c, 0.0), ConfigError);
  EXPECT_THROW(percentile_threshold(c, 100.0), ConfigError);
}

TEST(Threshold, Examples) {
  const auto c = corr_from_upper({0.9, 0.5, 0.1}, 3);
  const auto g = build_thresholded_graph(c, 0.9);
  ASSERT_EQ(g.edge_count(), 1u);
  EXPECT_EQ(g.edges[0], (Edge{0, 1, 0.9}));
  EXPECT_EQ(build_thresholded_graph(c, -1.0).edge_count(), 3u);
  EXPECT_EQ(build_thresholded_graph(c, 1.0 + 1e-12).edge_count(), 0u);
}

TEST(Threshold, NeverBelowPercentileTau) {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 30; ++rep) {
    const auto c = correlation_matrix(panel_from(random_panel(rng, 60, 12)));
    for (double p : {50.0, 90.0, 99.0}) {
      const double tau = percentile_threshold(c, p);
      const auto g = build_thresholded_graph(c, tau);
      EXPECT_GE(g.edge_count(), 1u);
      for (const auto& e : g.edges) {
        EXPECT_GE(e.weight, tau);
        EXPECT_LT(e.i, e.j);
      }
    }
  }
}

TEST(Mst, TriangleKeepsTwoShortestEdges) {
  // distances encoded directly in the weight field
  const auto g = graph_with(3, {{0, 1, 1.0}, {1, 2, 2.0}, {0, 2, 3.0}});
  const auto f = mst_reduce(g, [](const Edge& e) { return e.weight; });
  ASSERT_EQ(f.edge_count(), 2u);
  double total = 0;
  for (const auto& e : f.edges) total += e.weight;
  EXPECT_DOUBLE_EQ(total, 3.0);
}

TEST(Mst, TreeIsItsOwnForest) {
  const auto g = graph_with(5, {{0, 1, 0.9}, {1, 2, 0.8}, {1, 3, 0.7}, {3, 4, 0.95}});
  EXPECT_EQ(mst_reduce(g), g);
}

TEST(Mst, TwoDisjointTriangles) {
  const auto g = graph_with(6, {{0, 1, 0.9}, {1, 2, 0.8}, {0, 2, 0.7}, {3, 4, 0.6}, {4, 5, 0.95}, {3, 5, 0.85}});
  const auto f = mst_reduce(g);
  EXPECT_EQ(f.edge_count(), 4u);
  const auto comp = connected_components(f);
  EXPECT_EQ(std::set<std::size_t>(comp.begin(), comp.end()).size(), 2u);
  // Mantegna distance keeps the two strongest correlations per triangle
  EXPECT_EQ(f.edges, (std::vector<Edge>{{0, 1, 0.9}, {1, 2, 0.8}, {3, 5, 0.85}, {4, 5, 0.95}}));
}

TEST(Mst, EmptyGraphGivesEmptyForest) {
  const auto g = graph_with(4, {});
  EXPECT_EQ(mst_reduce(g).edge_count(), 0u);
}

TEST(Mst, TiesBrokenByNodeIndex) {
  const auto g = graph_with(3, {{0, 1, 0.5}, {1, 2, 0.5}, {0, 2, 0.5}});
  const auto f = mst_reduce(g);
  EXPECT_EQ(f.edges, (std::vector<Edge>{{0, 1, 0.5}, {0, 2, 0.5}}));
}

TEST(Mst, MatchesExhaustiveEnumerationOnSmallGraphs) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> w(-1.0, 1.0), coin(0.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 3 + rep % 5;
    MarketGraph g = graph_with(n, {});
    std::vector<oracle::WEdge> oe;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b)
        if (coin(rng) < 0.6) {
          const double rho = w(rng);
          g.add_edge(a, b, rho);
          oe.push_back({a, b, std::sqrt(2.0 * (1.0 - rho))});
        }
    const auto f = mst_reduce(g);
    double total = 0;
    for (const auto& e : f.edges) total += mantegna_distance(e.weight);
    EXPECT_NEAR(total, oracle::min_spanning_forest_weight(n, oe), 1e-12);
  }
}

TEST(Mst, ForestLawAndAcyclicity) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> w(-1.0, 1.0), coin(0.0, 1.0);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t n = 2 + rep * 3;
    const double density = 2.0 / static_cast<double>(n);
    MarketGraph g = graph_with(n, {});
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b)
        if (coin(rng) < density) g.add_edge(a, b, w(rng));
    const auto f = mst_reduce(g);
    EXPECT_TRUE(acyclic(f));
    EXPECT_EQ(f.edge_count(), forest_edge_law(g));
    EXPECT_EQ(connected_components(f), connected_components(g));
  }
}

TEST(Mst, InvariantUnderMonotoneDistanceTransform) {
  std::mt19937_64 rng(21);
  for (int rep = 0; rep < 20; ++rep) {
    const auto c = correlation_matrix(panel_from(random_panel(rng, 50, 15)));
    const auto g = build_thresholded_graph(c, percentile_threshold(c, 70));
    const auto d = mst_reduce(g);
    const auto d2 = mst_reduce(g, [](const Edge& e) { return 2.0 * (1.0 - e.weight); });
    EXPECT_EQ(d, d2);
  }
}

TEST(Dot, ExportFormat) {
  auto g = graph_with(3, {{0, 1, 0.123456789}});
  g.assets = {"AAA", "B\"B", "C"};
  std::ostringstream out;
  write_dot(g, out, "before");
  EXPECT_EQ(out.str(), "graph \"before\" {\n  \"AAA\";\n  \"B\\\"B\";\n  \"C\";\n"
                       "  \"AAA\" -- \"B\\\"B\" [weight=0.123457];\n}\n");
}

TEST(Graph, AdjacencyIsSymmetricBinary) {
  const auto g = graph_with(4, {{2, 0, 0.4}, {1, 3, 0.2}});
  const auto a = g.adjacency();
  EXPECT_EQ(a, a.transpose());
  EXPECT_EQ(a.sum(), 4.0);
  EXPECT_EQ(a(0, 2), 1.0);
  EXPECT_EQ(g.edges.front().i, 0u);
}
