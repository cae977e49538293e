#pragma once

#include "mgad/ingest.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mgad {

/// One market regime of the one-factor generator
///   r[t, i] = beta_i * f_t + eps[t, i],  f_t ~ N(0, 0.01^2),  eps ~ N(0, idiosyncratic_vol^2)
/// with beta_i uniform on [mean - spread, mean + spread]. Loadings of anomalous
/// nodes are scaled by (1 - anomaly_decorrelation).
struct RegimeSpec {
  std::string name;
  int days = 250;
  double factor_loading_mean = 1.0;
  double factor_loading_spread = 0.3;
  double idiosyncratic_vol = 0.01;
  std::vector<int> anomalous_nodes;
  double anomaly_decorrelation = 0.0;

  friend bool operator==(const RegimeSpec&, const RegimeSpec&) = default;
};

struct SynthSpec {
  int k = 40;
  std::uint64_t seed = 0;
  std::string start_date = "2004-10-27";
  std::vector<RegimeSpec> regimes;
};

inline constexpr double kFactorVol = 0.01;

/// Throws ConfigError on days < 2, bad node indices, non-positive vol, etc.
void validate(const RegimeSpec& spec, int k);

/// Regimes concatenated over consecutive weekdays from `start_date`; assets are `A00`, `A01`, ...
ReturnsMatrix generate(const std::vector<RegimeSpec>& specs, int k, std::uint64_t seed,
                       const std::string& start_date = "2004-10-27");
ReturnsMatrix generate(const SynthSpec& spec);

/// Date span each regime occupies in the generated panel, named after the regime.
std::vector<PeriodSpec> regime_periods(const SynthSpec& spec);

/// Consecutive weekdays starting at the first weekday on or after `start`.
std::vector<std::string> weekday_dates(const std::string& start, std::size_t count);

} // namespace mgad
