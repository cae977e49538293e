#include "mgad/config.hpp"

#include "mgad/anomaly.hpp"
#include "mgad/error.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>

namespace mgad {

namespace pt = boost::property_tree;

namespace {

bool valid_name(const std::string& s) {
  return !s.empty() &&
         std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isalnum(c) || c == '_' || c == '-'; });
}

pt::ptree read_ini(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config", fmt::format("line {}: {}", e.line(), e.message()));
  }
  return tree;
}

template <typename T>
T number(const std::string& key, const std::string& text) {
  T v{};
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) throw ConfigError("config", fmt::format("'{}': cannot parse '{}'", key, text));
  if constexpr (std::is_floating_point_v<T>)
    if (!std::isfinite(v)) throw ConfigError("config", fmt::format("'{}' must be finite", key));
  return v;
}

bool boolean(const std::string& key, std::string text) {
  std::transform(text.begin(), text.end(), text.begin(), [](unsigned char c) { return std::tolower(c); });
  if (text == "true" || text == "yes" || text == "on" || text == "1") return true;
  if (text == "false" || text == "no" || text == "off" || text == "0") return false;
  throw ConfigError("config", fmt::format("'{}': expected a boolean, got '{}'", key, text));
}

// Section lookup that tolerates dots in section names.
const pt::ptree* section(const pt::ptree& tree, const std::string& name) {
  const auto it = tree.find(name);
  return it == tree.not_found() ? nullptr : &it->second;
}

std::optional<std::string> value(const pt::ptree* sec, const std::string& key) {
  if (!sec) return std::nullopt;
  const auto it = sec->find(key);
  if (it == sec->not_found()) return std::nullopt;
  return it->second.data();
}

std::optional<std::string> section_prefix(const std::string& key, const std::string& prefix) {
  if (key.size() <= prefix.size() + 1 || key.compare(0, prefix.size(), prefix) != 0 || key[prefix.size()] != '.')
    return std::nullopt;
  return key.substr(prefix.size() + 1);
}

void reject_unknown(const pt::ptree* sec, const std::string& where, std::initializer_list<std::string_view> known) {
  if (!sec) return;
  for (const auto& [k, v] : *sec)
    if (std::find(known.begin(), known.end(), k) == known.end())
      throw ConfigError("config", fmt::format("unknown key '{}' in [{}]", k, where));
}

std::string resolve(const std::string& p, const std::filesystem::path& base) {
  if (p.empty() || base.empty() || std::filesystem::path(p).is_absolute()) return p;
  return (base / p).lexically_normal().string();
}

std::vector<int> int_list(const std::string& key, const std::string& text) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    std::string item = text.substr(pos, comma - pos);
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(number<int>(key, item));
    pos = comma + 1;
  }
  return out;
}

} // namespace

TrainConfig PipelineConfig::train_config(int k) const {
  const auto [h, b] = default_architecture(k);
  TrainConfig tc;
  tc.epochs = epochs;
  tc.learning_rate = learning_rate;
  tc.seed = seed;
  tc.hidden_dim = hidden_dim.value_or(h);
  tc.bottleneck_dim = bottleneck_dim.value_or(b);
  return tc;
}

void validate(const PipelineConfig& cfg) {
  if (cfg.input.empty()) throw ConfigError("config", "input path is required");
  if (cfg.periods.empty()) throw ConfigError("config", "at least one [period.<name>] section is required");
  for (const auto& p : cfg.periods)
    if (!valid_name(p.name))
      throw ConfigError("config", fmt::format("period name '{}' must use letters, digits, '_' or '-'", p.name));
  validate_periods(cfg.periods);
  if (!(cfg.percentile > 0.0 && cfg.percentile < 100.0)) throw ConfigError("config", "percentile must lie in (0, 100)");
  if (cfg.epochs <= 0) throw ConfigError("config", "epochs must be positive");
  if (!(cfg.learning_rate >= 0.0)) throw ConfigError("config", "learning_rate must be non-negative");
  if (cfg.q_grid.empty()) throw ConfigError("config", "q grid is empty");
  for (double q : cfg.q_grid)
    if (std::abs(q - 1.0) <= 1e-9 || !std::isfinite(q)) throw ConfigError("config", "q grid must exclude 1");
  if (!std::isfinite(cfg.detection_c)) throw ConfigError("config", "detection c must be finite");
}

PipelineConfig parse_pipeline_config(std::istream& in, const std::filesystem::path& base_dir) {
  const auto tree = read_ini(in);
  PipelineConfig cfg;
  cfg.q_grid = default_q_grid();

  for (const auto& [key, node] : tree) {
    if (!node.empty()) {
      if (key == "graph" || key == "autoencoder" || key == "detection" || section_prefix(key, "period")) continue;
      throw ConfigError("config", fmt::format("unknown section [{}]", key));
    }
    if (key == "input")
      cfg.input = resolve(node.data(), base_dir);
    else if (key == "output")
      cfg.output_dir = resolve(node.data(), base_dir);
    else
      throw ConfigError("config", fmt::format("unknown key '{}'", key));
  }

  const auto* graph = section(tree, "graph");
  reject_unknown(graph, "graph", {"percentile", "mst"});
  if (auto v = value(graph, "percentile")) cfg.percentile = number<double>("percentile", *v);
  if (auto v = value(graph, "mst")) cfg.mst = boolean("mst", *v);

  const auto* ae = section(tree, "autoencoder");
  reject_unknown(ae, "autoencoder", {"epochs", "learning_rate", "seed", "hidden_dim", "bottleneck_dim"});
  if (auto v = value(ae, "epochs")) cfg.epochs = number<int>("epochs", *v);
  if (auto v = value(ae, "learning_rate")) cfg.learning_rate = number<double>("learning_rate", *v);
  if (auto v = value(ae, "seed")) cfg.seed = number<std::uint64_t>("seed", *v);
  if (auto v = value(ae, "hidden_dim")) cfg.hidden_dim = number<int>("hidden_dim", *v);
  if (auto v = value(ae, "bottleneck_dim")) cfg.bottleneck_dim = number<int>("bottleneck_dim", *v);

  const auto* det = section(tree, "detection");
  reject_unknown(det, "detection", {"q_grid", "c"});
  if (auto v = value(det, "q_grid")) cfg.q_grid = parse_q_grid(*v);
  if (auto v = value(det, "c")) cfg.detection_c = number<double>("c", *v);

  for (const auto& [key, node] : tree) {
    const auto name = section_prefix(key, "period");
    if (!name) continue;
    reject_unknown(&node, key, {"start", "end"});
    auto start = value(&node, "start");
    auto end = value(&node, "end");
    if (!start || !end) throw ConfigError("config", fmt::format("[{}] needs start and end", key));
    cfg.periods.push_back({*name, *start, *end});
  }

  validate(cfg);
  return cfg;
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", fmt::format("cannot open '{}'", path.string()));
  return parse_pipeline_config(in, path.parent_path());
}

SynthSpec parse_synth_spec(std::istream& in) {
  const auto tree = read_ini(in);
  SynthSpec spec;
  for (const auto& [key, node] : tree) {
    if (!node.empty()) {
      if (!section_prefix(key, "regime")) throw ConfigError("config", fmt::format("unknown section [{}]", key));
      continue;
    }
    if (key == "k")
      spec.k = number<int>("k", node.data());
    else if (key == "seed")
      spec.seed = number<std::uint64_t>("seed", node.data());
    else if (key == "start_date")
      spec.start_date = node.data();
    else
      throw ConfigError("config", fmt::format("unknown key '{}'", key));
  }
  for (const auto& [key, node] : tree) {
    const auto name = section_prefix(key, "regime");
    if (!name) continue;
    if (!valid_name(*name)) throw ConfigError("config", fmt::format("regime name '{}' is not allowed", *name));
    reject_unknown(&node, key,
                   {"days", "factor_loading_mean", "factor_loading_spread", "idiosyncratic_vol", "anomalous_nodes",
                    "anomaly_decorrelation"});
    RegimeSpec r;
    r.name = *name;
    if (auto v = value(&node, "days")) r.days = number<int>("days", *v);
    if (auto v = value(&node, "factor_loading_mean")) r.factor_loading_mean = number<double>("factor_loading_mean", *v);
    if (auto v = value(&node, "factor_loading_spread"))
      r.factor_loading_spread = number<double>("factor_loading_spread", *v);
    if (auto v = value(&node, "idiosyncratic_vol")) r.idiosyncratic_vol = number<double>("idiosyncratic_vol", *v);
    if (auto v = value(&node, "anomalous_nodes")) r.anomalous_nodes = int_list("anomalous_nodes", *v);
    if (auto v = value(&node, "anomaly_decorrelation"))
      r.anomaly_decorrelation = number<double>("anomaly_decorrelation", *v);
    validate(r, spec.k);
    spec.regimes.push_back(std::move(r));
  }
  if (spec.k < 4) throw ConfigError("config", "k must be at least 4");
  if (spec.regimes.empty()) throw ConfigError("config", "at least one [regime.<name>] section is required");
  if (!is_iso_date(spec.start_date)) throw ConfigError("config", "start_date must be YYYY-MM-DD");
  return spec;
}

SynthSpec load_synth_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", fmt::format("cannot open '{}'", path.string()));
  return parse_synth_spec(in);
}

void write_period_sections(const std::vector<PeriodSpec>& periods, std::ostream& out) {
  for (const auto& p : periods) out << "[period." << p.name << "]\nstart = " << p.start << "\nend = " << p.end << "\n\n";
}

nlohmann::json to_json(const PipelineConfig& cfg) {
  nlohmann::json periods = nlohmann::json::array();
  for (const auto& p : cfg.periods) periods.push_back({{"name", p.name}, {"start", p.start}, {"end", p.end}});
  nlohmann::json ae = {{"epochs", cfg.epochs}, {"learning_rate", cfg.learning_rate}, {"seed", cfg.seed}};
  ae["hidden_dim"] = cfg.hidden_dim ? nlohmann::json(*cfg.hidden_dim) : nlohmann::json(nullptr);
  ae["bottleneck_dim"] = cfg.bottleneck_dim ? nlohmann::json(*cfg.bottleneck_dim) : nlohmann::json(nullptr);
  return {{"input", cfg.input},
          {"output", cfg.output_dir},
          {"periods", periods},
          {"graph", {{"percentile", cfg.percentile}, {"mst", cfg.mst}}},
          {"autoencoder", ae},
          {"detection", {{"q_grid", cfg.q_grid}, {"c", cfg.detection_c}}}};
}

PipelineConfig pipeline_config_from_json(const nlohmann::json& j) {
  try {
    PipelineConfig cfg;
    cfg.input = j.at("input").get<std::string>();
    cfg.output_dir = j.at("output").get<std::string>();
    for (const auto& p : j.at("periods"))
      cfg.periods.push_back({p.at("name").get<std::string>(), p.at("start").get<std::string>(),
                             p.at("end").get<std::string>()});
    cfg.percentile = j.at("graph").at("percentile").get<double>();
    cfg.mst = j.at("graph").at("mst").get<bool>();
    const auto& ae = j.at("autoencoder");
    cfg.epochs = ae.at("epochs").get<int>();
    cfg.learning_rate = ae.at("learning_rate").get<double>();
    cfg.seed = ae.at("seed").get<std::uint64_t>();
    if (!ae.at("hidden_dim").is_null()) cfg.hidden_dim = ae.at("hidden_dim").get<int>();
    if (!ae.at("bottleneck_dim").is_null()) cfg.bottleneck_dim = ae.at("bottleneck_dim").get<int>();
    cfg.q_grid = j.at("detection").at("q_grid").get<std::vector<double>>();
    cfg.detection_c = j.at("detection").at("c").get<double>();
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config", fmt::format("malformed config echo: {}", e.what()));
  }
}

} // namespace mgad
