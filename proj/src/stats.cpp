#include "mgad/stats.hpp"

#include "mgad/error.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

namespace mgad {

namespace {

constexpr double kTiny = 1e-300;
constexpr double kEps = 1e-12;
constexpr int kMaxIter = 300;

// Continued fraction for I_x(a, b), modified Lentz.
double beta_fraction(double a, double b, double x) {
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw TestError(fmt::format("incomplete beta did not converge for a={}, b={}, x={}", a, b, x));
}

struct Moments {
  double n, mean, var; // var with divisor n - 1
};

Moments moments(std::span<const double> v) {
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {n, mean, ss / (n - 1.0)};
}

void check_samples(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw TestError("each sample needs at least 2 observations");
  for (auto s : {a, b})
    for (double x : s)
      if (!std::isfinite(x)) throw TestError("non-finite observation");
}

} // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw TestError("incomplete beta needs a, b > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw TestError("incomplete beta needs x in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double front =
      std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x));
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_fraction(a, b, x) / a;
  return 1.0 - front * beta_fraction(b, a, 1.0 - x) / b;
}

double t_two_sided_p(double t, double df) {
  if (!(df > 0.0)) throw TestError("degrees of freedom must be positive");
  if (std::isnan(t)) throw TestError("t statistic is NaN");
  if (std::isinf(t)) return 0.0;
  return regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

TTestResult welch_ttest(std::span<const double> a, std::span<const double> b) {
  check_samples(a, b);
  const auto ma = moments(a), mb = moments(b);
  const double va = ma.var / ma.n, vb = mb.var / mb.n;
  if (!(va + vb > 0.0)) throw TestError("both samples have zero variance");
  TTestResult r;
  r.t_statistic = (ma.mean - mb.mean) / std::sqrt(va + vb);
  r.degrees_of_freedom = (va + vb) * (va + vb) / (va * va / (ma.n - 1.0) + vb * vb / (mb.n - 1.0));
  r.p_value = t_two_sided_p(r.t_statistic, r.degrees_of_freedom);
  return r;
}

TTestResult student_ttest(std::span<const double> a, std::span<const double> b) {
  check_samples(a, b);
  const auto ma = moments(a), mb = moments(b);
  const double df = ma.n + mb.n - 2.0;
  const double pooled = ((ma.n - 1.0) * ma.var + (mb.n - 1.0) * mb.var) / df;
  if (!(pooled > 0.0)) throw TestError("both samples have zero variance");
  TTestResult r;
  r.t_statistic = (ma.mean - mb.mean) / std::sqrt(pooled * (1.0 / ma.n + 1.0 / mb.n));
  r.degrees_of_freedom = df;
  r.p_value = t_two_sided_p(r.t_statistic, df);
  return r;
}

std::vector<TTestResult> compare_periods(const PeriodCounts& counts) {
  if (counts.size() < 2) throw TestError("need at least 2 periods to compare");
  std::vector<TTestResult> out;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    for (std::size_t j = i + 1; j < counts.size(); ++j) {
      TTestResult r;
      try {
        r = welch_ttest(counts[i].second, counts[j].second);
      } catch (const TestError& e) {
        throw TestError(fmt::format("{} vs {}: {}", counts[i].first, counts[j].first, e.what()));
      }
      r.pair = {counts[i].first, counts[j].first};
      out.push_back(std::move(r));
    }
  }
  return out;
}

void write_ttests_csv(const std::vector<TTestResult>& results, std::ostream& out) {
  out << "pair,t_statistic,df,p_value\n";
  for (const auto& r : results)
    out << fmt::format("{} vs {},{},{},{}\n", r.pair.first, r.pair.second, r.t_statistic, r.degrees_of_freedom,
                       r.p_value);
}

} // namespace mgad
