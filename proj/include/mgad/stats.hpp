#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mgad {

struct TTestResult {
  double t_statistic = 0.0;
  double degrees_of_freedom = 0.0;
  double p_value = 1.0; // two-sided
  std::pair<std::string, std::string> pair;
};

/// Regularized incomplete beta I_x(a, b) by Lentz's continued fraction
/// (tolerance 1e-12, at most 300 iterations).
double regularized_incomplete_beta(double a, double b, double x);

/// Two-sided tail probability P(|T| >= |t|) for Student's t with `df` degrees of freedom.
double t_two_sided_p(double t, double df);

/// Unequal-variance t-test with Welch-Satterthwaite degrees of freedom.
TTestResult welch_ttest(std::span<const double> a, std::span<const double> b);

/// Pooled-variance Student t-test.
TTestResult student_ttest(std::span<const double> a, std::span<const double> b);

using PeriodCounts = std::vector<std::pair<std::string, std::vector<double>>>;

/// Welch test for every unordered pair (i < j) in declaration order.
std::vector<TTestResult> compare_periods(const PeriodCounts& counts);

void write_ttests_csv(const std::vector<TTestResult>& results, std::ostream& out);

} // namespace mgad
