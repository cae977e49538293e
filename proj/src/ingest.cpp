#include "mgad/ingest.hpp"

#include "mgad/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <unordered_set>

namespace mgad {

namespace {

std::vector<std::string> split_line(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    cells.emplace_back(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return cells;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

} // namespace

bool is_iso_date(std::string_view s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  for (std::size_t i : {0, 1, 2, 3, 5, 6, 8, 9})
    if (s[i] < '0' || s[i] > '9') return false;
  int y = 0;
  unsigned m = 0, d = 0;
  std::from_chars(s.data(), s.data() + 4, y);
  std::from_chars(s.data() + 5, s.data() + 7, m);
  std::from_chars(s.data() + 8, s.data() + 10, d);
  return std::chrono::year_month_day{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}}.ok();
}

ReturnsMatrix parse_returns_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty input, expected header row");
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3); // UTF-8 BOM

  auto header = split_line(trim(line));
  if (header.size() < 2 || trim(header[0]) != "date")
    throw FormatError("header must start with 'date' followed by at least one asset ID");

  ReturnsMatrix out;
  std::unordered_set<std::string> seen;
  for (std::size_t c = 1; c < header.size(); ++c) {
    std::string id(trim(header[c]));
    if (id.empty()) throw FormatError(fmt::format("empty asset ID in header column {}", c + 1));
    if (!seen.insert(id).second) throw SchemaError(fmt::format("duplicate asset ID '{}'", id));
    out.assets.push_back(std::move(id));
  }
  const std::size_t k = out.assets.size();

  std::vector<double> cells;
  std::size_t row = 1; // header is row 1
  while (std::getline(in, line)) {
    ++row;
    const auto body = trim(line);
    if (body.empty()) continue;
    const auto fields = split_line(body);
    if (fields.size() != k + 1)
      throw FormatError(fmt::format("row {}: expected {} fields, found {}", row, k + 1, fields.size()));

    std::string date(trim(fields[0]));
    if (!is_iso_date(date)) throw CellError(row, 1, fmt::format("invalid date '{}'", date));
    if (!out.dates.empty() && date <= out.dates.back())
      throw OrderingError(fmt::format("row {}: date {} does not follow {}", row, date, out.dates.back()));
    out.dates.push_back(std::move(date));

    for (std::size_t c = 1; c <= k; ++c) {
      const auto cell = trim(fields[c]);
      if (cell.empty()) {
        cells.push_back(std::numeric_limits<double>::quiet_NaN());
        continue;
      }
      double v = 0.0;
      const auto* first = cell.data();
      if (*first == '+') ++first;
      const auto [ptr, ec] = std::from_chars(first, cell.data() + cell.size(), v);
      if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(v))
        throw CellError(row, c + 1, fmt::format("cannot parse '{}' as a number", cell));
      cells.push_back(v);
    }
  }

  const auto T = static_cast<Eigen::Index>(out.dates.size());
  out.values = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      cells.data(), T, static_cast<Eigen::Index>(k));
  return out;
}

ReturnsMatrix load_returns_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open for reading");
  return parse_returns_csv(in);
}

void write_returns_csv(const ReturnsMatrix& panel, std::ostream& out) {
  out << "date";
  for (const auto& a : panel.assets) out << ',' << a;
  out << '\n';
  for (Eigen::Index t = 0; t < panel.rows(); ++t) {
    out << panel.dates[static_cast<std::size_t>(t)];
    for (Eigen::Index j = 0; j < panel.cols(); ++j) {
      out << ',';
      const double v = panel.values(t, j);
      if (!std::isnan(v)) out << fmt::format("{}", v);
    }
    out << '\n';
  }
}

void save_returns_csv(const ReturnsMatrix& panel, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  write_returns_csv(panel, out);
  if (!out) throw IoError(path.string(), "write failed");
}

ReturnsMatrix clean_panel(const ReturnsMatrix& raw) {
  std::vector<Eigen::Index> keep;
  for (Eigen::Index t = 0; t < raw.rows(); ++t)
    if (!raw.values.row(t).hasNaN()) keep.push_back(t);
  if (keep.size() < 2)
    throw InsufficientDataError(fmt::format("only {} complete row(s) after cleaning, need at least 2", keep.size()));

  ReturnsMatrix out;
  out.assets = raw.assets;
  out.values = raw.values(keep, Eigen::all);
  out.dates.reserve(keep.size());
  for (auto t : keep) out.dates.push_back(raw.dates[static_cast<std::size_t>(t)]);
  return out;
}

ReturnsMatrix select_rows(const ReturnsMatrix& panel, std::string_view start, std::string_view end) {
  // dates are sorted, so the window is a contiguous block
  const auto lo = std::lower_bound(panel.dates.begin(), panel.dates.end(), start);
  const auto hi = std::upper_bound(panel.dates.begin(), panel.dates.end(), end);
  ReturnsMatrix out;
  out.assets = panel.assets;
  if (lo >= hi) {
    out.values.resize(0, panel.cols());
    return out;
  }
  out.dates.assign(lo, hi);
  const auto first = static_cast<Eigen::Index>(lo - panel.dates.begin());
  out.values = panel.values.middleRows(first, static_cast<Eigen::Index>(hi - lo));
  return out;
}

void validate_periods(const std::vector<PeriodSpec>& specs) {
  std::unordered_set<std::string> names;
  for (const auto& s : specs) {
    if (s.name.empty()) throw ConfigError("ingest", "period with empty name");
    if (!names.insert(s.name).second) throw ConfigError("ingest", fmt::format("duplicate period '{}'", s.name));
    if (!is_iso_date(s.start) || !is_iso_date(s.end))
      throw ConfigError("ingest", fmt::format("period '{}': dates must be YYYY-MM-DD", s.name));
    if (s.start > s.end) throw ConfigError("ingest", fmt::format("period '{}': start after end", s.name));
  }
  for (std::size_t i = 0; i < specs.size(); ++i)
    for (std::size_t j = i + 1; j < specs.size(); ++j)
      if (specs[i].start <= specs[j].end && specs[j].start <= specs[i].end)
        throw ConfigError("ingest", fmt::format("periods '{}' and '{}' overlap", specs[i].name, specs[j].name));
}

std::vector<PeriodPanel> split_periods(const ReturnsMatrix& panel, const std::vector<PeriodSpec>& specs) {
  validate_periods(specs);
  std::vector<PeriodPanel> out;
  out.reserve(specs.size());
  for (const auto& s : specs) {
    auto sub = select_rows(panel, s.start, s.end);
    if (sub.rows() < 2)
      throw InsufficientDataError(fmt::format("period '{}' captures {} row(s), need at least 2", s.name, sub.rows()));
    out.push_back({s, std::move(sub)});
  }
  return out;
}

} // namespace mgad
