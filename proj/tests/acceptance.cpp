// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include "mgad/anomaly.hpp"
#include "mgad/autoencoder.hpp"
#include "mgad/config.hpp"
#include "mgad/corrnet.hpp"
#include "mgad/error.hpp"
#include "mgad/graphstats.hpp"
#include "mgad/ingest.hpp"
#include "mgad/pipeline.hpp"
#include "mgad/stats.hpp"
#include "mgad/synthgen.hpp"

#include "oracles.hpp"

#include <fmt/format.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace mgad;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(const std::string& name, bool ok, const std::string& detail) {
  fmt::print("{} {}: {}\n", ok ? "PASS" : "FAIL", name, detail);
  std::fflush(stdout);
  if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ReturnsMatrix random_panel(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> n(0.0, 0.01);
  ReturnsMatrix p;
  p.dates = weekday_dates("2010-01-04", static_cast<std::size_t>(rows));
  for (int c = 0; c < cols; ++c) p.assets.push_back(fmt::format("S{:02}", c));
  p.values.resize(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) p.values(r, c) = n(rng);
  return p;
}

void correlation_oracle() {
  std::mt19937_64 rng(101);
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const auto panel = random_panel(rng, 50, 10);
    const auto corr = correlation_matrix(panel);
    for (Eigen::Index u = 0; u < 10; ++u)
      for (Eigen::Index v = 0; v < 10; ++v) {
        const double expect = u == v ? 1.0 : oracle::correlation(panel.values, u, v);
        worst = std::max(worst, std::abs(corr.rho(u, v) - expect));
      }
  }
  const double secs = seconds_since(t0);
  report("correlation oracle", worst <= 1e-12 && secs < 5.0,
         fmt::format("100 panels 50x10, max abs diff {:.3g} (tol 1e-12), {:.3f} s (limit 5 s)", worst, secs));
}

void percentile_exactness() {
  int bad = 0;
  std::size_t edges_seen = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    const auto panel = random_panel(rng, 120, 30);
    const auto corr = correlation_matrix(panel);
    std::set<double> distinct;
    for (Eigen::Index i = 0; i < 30; ++i)
      for (Eigen::Index j = i + 1; j < 30; ++j) distinct.insert(corr.rho(i, j));
    if (distinct.size() != 435) {
      ++bad;
      continue;
    }
    const auto g = build_thresholded_graph(corr, percentile_threshold(corr, 99.0));
    edges_seen = g.edge_count();
    if (g.edge_count() != 5) ++bad;
  }
  report("percentile exactness", bad == 0,
         fmt::format("k=30, p=99, expected 435 - 431 + 1 = 5 edges, {} of 20 seeds wrong (last count {})", bad,
                     edges_seen));
}

MarketGraph random_graph(std::mt19937_64& rng, std::size_t n, double density) {
  MarketGraph g;
  for (std::size_t i = 0; i < n; ++i) g.assets.push_back(fmt::format("N{}", i));
  std::bernoulli_distribution keep(density);
  std::uniform_real_distribution<double> w(-1.0, 1.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (keep(rng)) g.add_edge(i, j, w(rng));
  return g;
}

std::size_t bfs_components(const MarketGraph& g) {
  std::vector<std::vector<std::size_t>> adj(g.node_count());
  for (const auto& e : g.edges) {
    adj[e.i].push_back(e.j);
    adj[e.j].push_back(e.i);
  }
  std::vector<bool> seen(g.node_count(), false);
  std::size_t comps = 0;
  for (std::size_t s = 0; s < g.node_count(); ++s) {
    if (seen[s]) continue;
    ++comps;
    std::vector<std::size_t> stack{s};
    seen[s] = true;
    while (!stack.empty()) {
      const auto v = stack.back();
      stack.pop_back();
      for (auto u : adj[v])
        if (!seen[u]) seen[u] = stack.emplace_back(u), true;
    }
  }
  return comps;
}

void mst_correctness() {
  std::mt19937_64 rng(303);
  std::uniform_int_distribution<std::size_t> small(2, 9);
  double worst = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    const auto g = random_graph(rng, small(rng), 0.6);
    std::vector<oracle::WEdge> wedges;
    for (const auto& e : g.edges) wedges.push_back({e.i, e.j, mantegna_distance(e.weight)});
    const auto forest = mst_reduce(g);
    double total = 0.0;
    for (const auto& e : forest.edges) total += mantegna_distance(e.weight);
    worst = std::max(worst, std::abs(total - oracle::min_spanning_forest_weight(g.node_count(), wedges)));
  }
  std::uniform_int_distribution<std::size_t> big(1, 200);
  std::uniform_real_distribution<double> dens(0.0, 0.05);
  int law_failures = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const auto g = random_graph(rng, big(rng), dens(rng));
    const auto forest = mst_reduce(g);
    if (forest.edge_count() != g.node_count() - bfs_components(g) || bfs_components(forest) != bfs_components(g))
      ++law_failures;
  }
  report("MST correctness", worst <= 1e-12 && law_failures == 0,
         fmt::format("50 graphs <=9 nodes max |weight - exhaustive| {:.3g}; forest law failures {} of 100", worst,
                     law_failures));
}

void gradient_fidelity() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::mt19937_64 rng(seed + 500);
    TrainConfig cfg;
    cfg.hidden_dim = 4;
    cfg.bottleneck_dim = 2;
    cfg.seed = seed;
    auto model = init_model(5, cfg);
    std::normal_distribution<double> n(0.0, 0.3);
    for (auto& b : model.biases)
      for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = n(rng);
    std::bernoulli_distribution bit(0.4);
    Eigen::MatrixXd rows(5, 5);
    for (Eigen::Index i = 0; i < 5; ++i)
      for (Eigen::Index j = 0; j < 5; ++j) rows(i, j) = bit(rng) ? 1.0 : 0.0;

    const auto [loss, grad] = loss_and_gradient(model, rows);
    AutoencoderModel packed = model;
    packed.weights = grad.weights;
    packed.biases = grad.biases;
    const Eigen::VectorXd analytic = flatten_parameters(packed);
    const Eigen::VectorXd theta = flatten_parameters(model);
    const double h = 1e-5;
    for (Eigen::Index p = 0; p < theta.size(); ++p) {
      Eigen::VectorXd t = theta;
      t(p) += h;
      assign_parameters(model, t);
      const double up = mean_loss(model, rows);
      t(p) -= 2 * h;
      assign_parameters(model, t);
      const double down = mean_loss(model, rows);
      const double fd = (up - down) / (2 * h);
      worst = std::max(worst, std::abs(analytic(p) - fd) / std::max(std::abs(analytic(p)) + std::abs(fd), 1e-8));
    }
  }
  const double secs = seconds_since(t0);
  report("gradient fidelity", worst < 1e-4 && secs < 10.0,
         fmt::format("(5,4,2,4,5), 10 seeds, max rel err {:.3g} (limit 1e-4), {:.3f} s (limit 10 s)", worst, secs));
}

PipelineConfig scenario_config(const SynthSpec& spec) {
  PipelineConfig c;
  c.periods = regime_periods(spec);
  c.q_grid = make_q_grid(-0.5, 0.5, 0.1);
  c.seed = spec.seed;
  return c;
}

void training_descent() {
  int ok = 0;
  std::string detail;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    SynthSpec spec;
    spec.k = 40;
    spec.seed = seed;
    spec.regimes = {RegimeSpec{.name = "all"}};
    const auto panel = generate(spec);
    const auto cfg = scenario_config(spec);
    const auto corr = correlation_matrix(panel);
    const auto graph = mst_reduce(build_thresholded_graph(corr, percentile_threshold(corr, cfg.percentile)));
    const Eigen::MatrixXd rows = graph.adjacency();
    const auto tc = cfg.train_config(40);
    const auto [model, trace] = train(init_model(40, tc), rows, tc);
    const double initial = trace.loss.front(), final_loss = mean_loss(model, rows);
    if (final_loss < 0.5 * initial) ++ok;
    detail += fmt::format(" {:.4f}->{:.4f}", initial, final_loss);
  }
  report("training descent", ok == 5, fmt::format("k=40, 500 epochs, {}/5 seeds below half initial loss:{}", ok, detail));
}

void entropy_identities() {
  double worst_uniform = 0.0;
  for (int W : {2, 10, 100})
    for (double q : {-0.5, 0.5, 2.0}) {
      ScoreDistribution d;
      d.p = Eigen::VectorXd::Constant(W, 1.0 / W);
      const double expect = (1.0 - std::pow(static_cast<double>(W), 1.0 - q)) / (q - 1.0);
      worst_uniform = std::max(worst_uniform, std::abs(tsallis_entropy(d, q) - expect));
    }

  std::mt19937_64 rng(707);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  std::uniform_int_distribution<int> size(2, 60);
  std::uniform_real_distribution<double> qd(-0.5, 3.0);
  auto random_dist = [&] {
    ScoreDistribution d;
    d.p.resize(size(rng));
    for (Eigen::Index i = 0; i < d.p.size(); ++i) d.p(i) = u(rng);
    d.p /= d.p.sum();
    return d;
  };

  double worst_cont = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const auto d = random_dist();
    const double s1 = shannon_entropy_nats(d);
    for (double q : {1.0 - 1e-6, 1.0 + 1e-6}) worst_cont = std::max(worst_cont, std::abs(tsallis_entropy(d, q) - s1));
  }

  double worst_sum = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    const auto d = random_dist();
    double q = qd(rng);
    if (std::abs(q - 1.0) < 1e-3) q += 0.01;
    worst_sum = std::max(worst_sum, std::abs(node_scores(d, q).sum() - tsallis_entropy(d, q)));
  }
  report("entropy identities", worst_uniform <= 1e-12 && worst_cont <= 1e-5 && worst_sum <= 1e-12,
         fmt::format("uniform max err {:.3g} (tol 1e-12); q->1 max gap {:.3g} (tol 1e-5); "
                     "sum of node scores max err {:.3g} over 1000 (tol 1e-12)",
                     worst_uniform, worst_cont, worst_sum));
}

void welch_oracle() {
  double worst = 0.0;
  for (double df : {1.0, 5.0, 10.0, 30.0})
    for (double t : {0.1, 0.5, 1.0, 2.0, 3.5})
      worst = std::max(worst, std::abs(t_two_sided_p(t, df) - oracle::t_two_sided_p_quadrature(t, df)));

  std::mt19937_64 rng(909);
  std::normal_distribution<double> n(0.0, 1.0);
  bool antisym = true;
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> a(8), b(11);
    for (auto& x : a) x = n(rng);
    for (auto& x : b) x = n(rng) + 0.5;
    const auto ab = welch_ttest(a, b), ba = welch_ttest(b, a);
    antisym = antisym && ab.t_statistic == -ba.t_statistic && ab.p_value == ba.p_value &&
              ab.degrees_of_freedom == ba.degrees_of_freedom;
  }
  const std::vector<double> same{1.0, 2.0, 4.0, 7.0};
  const auto id = welch_ttest(same, same);
  const bool identical = id.t_statistic == 0.0 && id.p_value == 1.0;
  report("Welch t-test oracle", worst <= 1e-8 && antisym && identical,
         fmt::format("max |p - quadrature| {:.3g} at df 1/5/10/30 (tol 1e-8); antisymmetry {}; identical samples "
                     "t={} p={}",
                     worst, antisym ? "ok" : "broken", id.t_statistic, id.p_value));
}

SynthSpec crisis_scenario(std::uint64_t seed) {
  SynthSpec s;
  s.k = 40;
  s.seed = seed;
  s.regimes = {RegimeSpec{.name = "before"},
               RegimeSpec{.name = "during", .anomalous_nodes = {3, 11, 20, 27, 38}, .anomaly_decorrelation = 0.9},
               RegimeSpec{.name = "after"}};
  return s;
}

void scenario_criteria() {
  const auto t0 = std::chrono::steady_clock::now();
  double sum_mean[3] = {0, 0, 0};
  int significant = 0, direction = 0, fewer_edges = 0, lower_clustering = 0, degenerate = 0;
  std::string per_seed;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto spec = crisis_scenario(seed);
    const auto cfg = scenario_config(spec);
    const auto panel = generate(spec);
    std::vector<PeriodResult> res;
    for (const auto& [p, sub] : split_periods(panel, cfg.periods)) res.push_back(analyze_period(p, sub, cfg));
    for (int r = 0; r < 3; ++r) {
      const auto c = res[r].counts();
      sum_mean[r] += std::accumulate(c.begin(), c.end(), 0.0) / static_cast<double>(c.size());
    }

    bool sig = false;
    try {
      const auto tt = compare_periods({{"before", res[0].counts()}, {"during", res[1].counts()}, {"after", res[2].counts()}});
      // pairs in declaration order: before-during, before-after, during-after
      sig = tt[0].p_value < 0.01 && tt[2].p_value < 0.01;
      per_seed += fmt::format(" {:.2g}/{:.2g}", tt[0].p_value, tt[2].p_value);
    } catch (const Error&) {
      ++degenerate;
      per_seed += " degenerate";
    }
    if (sig) ++significant;

    const auto& mid = res[1].summary;
    const bool edges = mid.edge_count < res[0].summary.edge_count && mid.edge_count < res[2].summary.edge_count;
    const bool clust =
        mid.clustering_coeff < res[0].summary.clustering_coeff && mid.clustering_coeff < res[2].summary.clustering_coeff;
    fewer_edges += edges;
    lower_clustering += clust;
    direction += edges && clust;
  }
  const double secs = seconds_since(t0);
  const double m0 = sum_mean[0] / 10, m1 = sum_mean[1] / 10, m2 = sum_mean[2] / 10;
  const bool power = m1 > m0 && m1 > m2 && significant >= 9 && secs < 120.0;
  report("end-to-end detection power", power,
         fmt::format("mean count before/during/after {:.3f}/{:.3f}/{:.3f}; injected-vs-clean p<0.01 in {}/10 seeds "
                     "(need 9){}; p per seed:{}; {:.1f} s (limit 120 s)",
                     m0, m1, m2, significant, degenerate ? fmt::format(", {} degenerate", degenerate) : "", per_seed,
                     secs));
  report("injected-regime graph direction", direction >= 8,
         fmt::format("post-MST fewer edges in {}/10, lower clustering in {}/10, both in {}/10 (need 8)", fewer_edges,
                     lower_clustering, direction));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void determinism() {
  const auto dir = fs::temp_directory_path() / fmt::format("mgad_accept_{}", ::getpid());
  fs::remove_all(dir);
  fs::create_directories(dir);
  SynthSpec spec = crisis_scenario(3);
  for (auto& r : spec.regimes) r.days = 120;
  save_returns_csv(generate(spec), dir / "returns.csv");
  {
    std::ofstream cfg(dir / "fixed.cfg");
    cfg << "input = returns.csv\noutput = out\n[autoencoder]\nepochs = 100\n";
    write_period_sections(regime_periods(spec), cfg);
  }
  const std::string cli = MGAD_CLI_PATH;
  // identical command both times; first run's outputs are moved aside before the second
  const auto cmd = fmt::format("{} run --config {} --seed 7 > /dev/null 2>&1", cli, (dir / "fixed.cfg").string());
  const int s1 = WEXITSTATUS(std::system(cmd.c_str()));
  if (s1 == 0) fs::rename(dir / "out", dir / "first");
  const int s2 = WEXITSTATUS(std::system(cmd.c_str()));
  bool same = s1 == 0 && s2 == 0;
  std::string detail = fmt::format("exit codes {} {}", s1, s2);
  if (same) {
    auto masked = [&](const std::string& sub) {
      static const std::regex stamp(R"re("generated_at": "[^"]*")re");
      return std::regex_replace(slurp(dir / sub / "report.json"), stamp, R"("generated_at": "")");
    };
    same = masked("first") == masked("out");
    std::size_t files = 0, differing = 0;
    for (const auto& e : fs::directory_iterator(dir / "first")) {
      if (e.path().filename() == "report.json") continue;
      ++files;
      differing += slurp(e.path()) != slurp(dir / "out" / e.path().filename());
    }
    detail += fmt::format("; report.json {} modulo generated_at; other outputs differing {}/{}",
                          same ? "identical" : "differs", differing, files);
    same = same && differing == 0;
  }
  fs::remove_all(dir);
  report("determinism", same, detail);
}

} // namespace

int main() {
  correlation_oracle();
  percentile_exactness();
  mst_correctness();
  gradient_fidelity();
  training_descent();
  entropy_identities();
  welch_oracle();
  scenario_criteria();
  determinism();
  fmt::print("{} criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
