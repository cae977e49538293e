#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <string_view>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace mgad {

/// T x k panel of simple returns. Rows follow `dates`, columns follow `assets`.
/// Before cleaning, missing cells hold quiet NaN.
struct ReturnsMatrix {
  std::vector<std::string> dates;
  std::vector<std::string> assets;
  Eigen::MatrixXd values;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
  bool has_missing() const { return values.hasNaN(); }

  friend bool operator==(const ReturnsMatrix& a, const ReturnsMatrix& b) {
    if (a.dates != b.dates || a.assets != b.assets) return false;
    if (a.values.rows() != b.values.rows() || a.values.cols() != b.values.cols()) return false;
    // NaN-aware cell comparison so pre-clean panels compare sensibly.
    for (Eigen::Index i = 0; i < a.values.size(); ++i) {
      const double x = a.values.data()[i], y = b.values.data()[i];
      if (!(x == y || (std::isnan(x) && std::isnan(y)))) return false;
    }
    return true;
  }
};

/// Named inclusive date window.
struct PeriodSpec {
  std::string name;
  std::string start;
  std::string end;

  friend bool operator==(const PeriodSpec&, const PeriodSpec&) = default;
};

struct PeriodPanel {
  PeriodSpec spec;
  ReturnsMatrix panel;
};

/// True when `s` is a valid `YYYY-MM-DD` calendar date.
bool is_iso_date(std::string_view s);

ReturnsMatrix parse_returns_csv(std::istream& in);
ReturnsMatrix load_returns_csv(const std::filesystem::path& path);

/// Writes the same schema `load_returns_csv` reads. Values use round-trip precision.
void write_returns_csv(const ReturnsMatrix& panel, std::ostream& out);
void save_returns_csv(const ReturnsMatrix& panel, const std::filesystem::path& path);

/// Drops every row that has a missing cell. Throws InsufficientDataError if fewer than two rows survive.
ReturnsMatrix clean_panel(const ReturnsMatrix& raw);

/// Rows of `panel` whose date lies in [start, end], in order.
ReturnsMatrix select_rows(const ReturnsMatrix& panel, std::string_view start, std::string_view end);

std::vector<PeriodPanel> split_periods(const ReturnsMatrix& panel, const std::vector<PeriodSpec>& specs);

/// Rejects malformed dates, start > end, duplicate names and overlapping windows.
void validate_periods(const std::vector<PeriodSpec>& specs);

} // namespace mgad
