#include "mgad/synthgen.hpp"

#include "mgad/error.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <random>
#include <set>

namespace mgad {

namespace {

std::string format_date(std::chrono::sys_days d) {
  const std::chrono::year_month_day ymd{d};
  return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                     static_cast<unsigned>(ymd.day()));
}

std::chrono::sys_days parse_date(const std::string& s) {
  if (!is_iso_date(s)) throw ConfigError("synthgen", fmt::format("invalid start date '{}'", s));
  const int y = std::stoi(s.substr(0, 4));
  const auto m = static_cast<unsigned>(std::stoi(s.substr(5, 2)));
  const auto d = static_cast<unsigned>(std::stoi(s.substr(8, 2)));
  return std::chrono::sys_days{std::chrono::year{y} / std::chrono::month{m} / std::chrono::day{d}};
}

} // namespace

void validate(const RegimeSpec& spec, int k) {
  const auto fail = [&](const std::string& w) { throw ConfigError("synthgen", fmt::format("regime '{}': {}", spec.name, w)); };
  if (spec.days < 2) fail("days must be at least 2");
  if (!std::isfinite(spec.factor_loading_mean)) fail("factor_loading_mean must be finite");
  if (!(spec.factor_loading_spread >= 0.0) || !std::isfinite(spec.factor_loading_spread))
    fail("factor_loading_spread must be non-negative");
  if (!(spec.idiosyncratic_vol > 0.0) || !std::isfinite(spec.idiosyncratic_vol)) fail("idiosyncratic_vol must be positive");
  if (!(spec.anomaly_decorrelation >= 0.0 && spec.anomaly_decorrelation <= 1.0))
    fail("anomaly_decorrelation must lie in [0, 1]");
  std::set<int> seen;
  for (int n : spec.anomalous_nodes) {
    if (n < 0 || n >= k) fail(fmt::format("anomalous node {} outside [0, {})", n, k));
    if (!seen.insert(n).second) fail(fmt::format("anomalous node {} listed twice", n));
  }
}

std::vector<std::string> weekday_dates(const std::string& start, std::size_t count) {
  using namespace std::chrono;
  auto day = parse_date(start);
  std::vector<std::string> out;
  out.reserve(count);
  while (out.size() < count) {
    const weekday wd{day};
    if (wd != Saturday && wd != Sunday) out.push_back(format_date(day));
    day += days{1};
  }
  return out;
}

ReturnsMatrix generate(const std::vector<RegimeSpec>& specs, int k, std::uint64_t seed, const std::string& start_date) {
  if (k < 4) throw ConfigError("synthgen", "k must be at least 4");
  if (specs.empty()) throw ConfigError("synthgen", "at least one regime is required");
  std::size_t total = 0;
  for (const auto& s : specs) {
    validate(s, k);
    total += static_cast<std::size_t>(s.days);
  }

  ReturnsMatrix out;
  out.dates = weekday_dates(start_date, total);
  for (int i = 0; i < k; ++i) out.assets.push_back(fmt::format("A{:02d}", i));
  out.values.resize(static_cast<Eigen::Index>(total), k);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::Index row = 0;
  for (const auto& s : specs) {
    std::uniform_real_distribution<double> loading(s.factor_loading_mean - s.factor_loading_spread,
                                                   s.factor_loading_mean + s.factor_loading_spread);
    Eigen::VectorXd beta(k);
    for (int i = 0; i < k; ++i) beta(i) = s.factor_loading_spread > 0.0 ? loading(rng) : s.factor_loading_mean;
    for (int n : s.anomalous_nodes) beta(n) *= 1.0 - s.anomaly_decorrelation;

    for (int t = 0; t < s.days; ++t, ++row) {
      const double f = kFactorVol * normal(rng);
      for (int i = 0; i < k; ++i) out.values(row, i) = beta(i) * f + s.idiosyncratic_vol * normal(rng);
    }
  }
  return out;
}

ReturnsMatrix generate(const SynthSpec& spec) { return generate(spec.regimes, spec.k, spec.seed, spec.start_date); }

std::vector<PeriodSpec> regime_periods(const SynthSpec& spec) {
  std::size_t total = 0;
  for (const auto& r : spec.regimes) total += static_cast<std::size_t>(std::max(r.days, 0));
  const auto dates = weekday_dates(spec.start_date, total);
  std::vector<PeriodSpec> out;
  std::size_t at = 0;
  for (const auto& r : spec.regimes) {
    out.push_back({r.name, dates[at], dates[at + static_cast<std::size_t>(r.days) - 1]});
    at += static_cast<std::size_t>(r.days);
  }
  return out;
}

} // namespace mgad
