#include "mgad/pipeline.hpp"

#include "mgad/error.hpp"
#include "mgad/version.hpp"

#include <fmt/format.h>

#include <chrono>
#include <fstream>
#include <sstream>

namespace mgad {

namespace {

[[noreturn]] void rethrow_in_period(const Error& e, const std::string& period) {
  throw Error(e.kind(), e.module(), fmt::format("period '{}': {}", period, e.what()));
}

std::string utc_timestamp() {
  const auto now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
  const auto day = std::chrono::floor<std::chrono::days>(now);
  const std::chrono::year_month_day ymd{day};
  const std::chrono::hh_mm_ss hms{now - day};
  return fmt::format("{:04d}-{:02d}-{:02d}T{:02d}:{:02d}:{:02d}Z", static_cast<int>(ymd.year()),
                     static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), hms.hours().count(),
                     hms.minutes().count(), hms.seconds().count());
}

nlohmann::json to_json(const GraphSummary& s) {
  return {{"nodes", s.node_count},
          {"edges", s.edge_count},
          {"isolated_fraction", s.isolated_fraction},
          {"max_degree", s.max_degree},
          {"mean_degree", s.mean_degree},
          {"std_degree", s.std_degree},
          {"clustering_coeff", s.clustering_coeff}};
}

class OutputWriter {
public:
  explicit OutputWriter(std::filesystem::path dir) : dir_(std::move(dir)) {}

  void write(const std::string& name, const std::string& content) {
    const auto path = dir_ / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path.string(), "cannot open for writing");
    written_.push_back(path);
    out << content;
    out.close();
    if (!out) throw IoError(path.string(), "write failed");
  }

  void rollback() noexcept {
    std::error_code ec;
    for (const auto& p : written_) std::filesystem::remove(p, ec);
    written_.clear();
  }

  const std::vector<std::filesystem::path>& written() const { return written_; }

private:
  std::filesystem::path dir_;
  std::vector<std::filesystem::path> written_;
};

} // namespace

std::vector<double> PeriodResult::counts() const {
  std::vector<double> c;
  for (const auto& s : sweep.sets) c.push_back(static_cast<double>(s.count()));
  return c;
}

PeriodResult analyze_period(const PeriodSpec& spec, const ReturnsMatrix& panel, const PipelineConfig& cfg,
                            const WarningSink& warn) {
  PeriodResult r;
  r.spec = spec;
  r.observations = static_cast<std::size_t>(panel.rows());
  try {
    const auto corr = correlation_matrix(panel);
    r.tau = percentile_threshold(corr, cfg.percentile);
    auto thresholded = build_thresholded_graph(corr, r.tau);
    r.thresholded = summarize(thresholded);
    r.graph = cfg.mst ? mst_reduce(thresholded) : std::move(thresholded);
    r.summary = summarize(r.graph);

    const int k = static_cast<int>(panel.cols());
    r.train = cfg.train_config(k);
    const Eigen::MatrixXd rows = r.graph.adjacency();
    auto [model, trace] = train(init_model(k, r.train), rows, r.train);
    r.trace = std::move(trace);
    r.reconstruction_errors = reconstruction_errors(model, rows);
    r.sweep = sweep_q(r.reconstruction_errors, cfg.q_grid, ThresholdRule{cfg.detection_c}, panel.assets);
    if (warn)
      for (double q : r.sweep.skipped)
        warn(fmt::format("period '{}': skipped q = {} (zero reconstruction error with q <= 0)", spec.name, q));
  } catch (const Error& e) {
    rethrow_in_period(e, spec.name);
  }
  return r;
}

AnomalyReport analyze(const PipelineConfig& cfg, const WarningSink& warn) {
  validate(cfg);
  AnomalyReport report;
  report.tool_version = kVersion;
  report.generated_at = utc_timestamp();
  report.config = cfg;

  const auto panel = clean_panel(load_returns_csv(cfg.input));
  for (const auto& [spec, sub] : split_periods(panel, cfg.periods))
    report.periods.push_back(analyze_period(spec, sub, cfg, warn));

  if (report.periods.size() >= 2) {
    PeriodCounts counts;
    for (const auto& p : report.periods) counts.emplace_back(p.spec.name, p.counts());
    report.ttests = compare_periods(counts);
  }
  return report;
}

AnomalyReport run_pipeline(const PipelineConfig& cfg, const WarningSink& warn) {
  auto report = analyze(cfg, warn);
  export_outputs(report, cfg.output_dir);
  return report;
}

nlohmann::json to_json(const AnomalyReport& report) {
  nlohmann::json periods = nlohmann::json::array();
  for (const auto& p : report.periods) {
    nlohmann::json sweep = nlohmann::json::array();
    for (const auto& s : p.sweep.sets)
      sweep.push_back({{"q", s.q}, {"threshold", s.threshold}, {"anomaly_count", s.count()}, {"anomalies", s.anomalies}});
    nlohmann::json re = nlohmann::json::object();
    for (std::size_t i = 0; i < p.graph.assets.size(); ++i)
      re[p.graph.assets[i]] = p.reconstruction_errors(static_cast<Eigen::Index>(i));
    periods.push_back({
        {"name", p.spec.name},
        {"start", p.spec.start},
        {"end", p.spec.end},
        {"observations", p.observations},
        {"tau", p.tau},
        {"thresholded_graph", to_json(p.thresholded)},
        {"graph", to_json(p.summary)},
        {"autoencoder",
         {{"layer_dims", {p.graph.node_count(), p.train.hidden_dim, p.train.bottleneck_dim, p.train.hidden_dim,
                          p.graph.node_count()}},
          {"epochs", p.train.epochs},
          {"learning_rate", p.train.learning_rate},
          {"initial_loss", p.trace.loss.empty() ? 0.0 : p.trace.loss.front()},
          {"final_loss", p.trace.loss.empty() ? 0.0 : p.trace.loss.back()}}},
        {"reconstruction_errors", re},
        {"sweep", sweep},
        {"skipped_q", p.sweep.skipped},
    });
  }
  nlohmann::json tests = nlohmann::json::array();
  for (const auto& t : report.ttests)
    tests.push_back({{"pair", {t.pair.first, t.pair.second}},
                     {"t_statistic", t.t_statistic},
                     {"df", t.degrees_of_freedom},
                     {"p_value", t.p_value}});
  return {{"tool_version", report.tool_version},
          {"generated_at", report.generated_at},
          {"config", to_json(report.config)},
          {"periods", periods},
          {"ttests", tests}};
}

std::vector<std::filesystem::path> export_outputs(const AnomalyReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(dir.string(), ec.message());

  OutputWriter out(dir);
  try {
    out.write("report.json", to_json(report).dump(2) + "\n");

    std::ostringstream anomalies, sweep;
    anomalies << "period,q,node_id,score,threshold,flagged\n";
    sweep << "period,q,anomaly_count\n";
    for (const auto& p : report.periods) {
      std::ostringstream dot, degrees, trace;
      write_dot(p.graph, dot, p.spec.name);
      write_degree_ranking_csv(p.graph, degrees);
      write_trace_csv(p.trace, trace);
      out.write("graph_" + p.spec.name + ".dot", dot.str());
      out.write("degrees_" + p.spec.name + ".csv", degrees.str());
      out.write("trace_" + p.spec.name + ".csv", trace.str());

      for (const auto& s : p.sweep.sets) {
        sweep << fmt::format("{},{},{}\n", p.spec.name, s.q, s.count());
        for (std::size_t i = 0; i < s.indices.size(); ++i)
          anomalies << fmt::format("{},{},{},{},{},1\n", p.spec.name, s.q, s.anomalies[i],
                                   s.scores(static_cast<Eigen::Index>(s.indices[i])), s.threshold);
      }
    }
    out.write("anomalies.csv", anomalies.str());
    out.write("sweep.csv", sweep.str());

    std::ostringstream tt;
    write_ttests_csv(report.ttests, tt);
    out.write("ttests.csv", tt.str());
  } catch (...) {
    out.rollback();
    throw;
  }
  return out.written();
}

} // namespace mgad
