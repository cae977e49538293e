#pragma once

#include <stdexcept>
#include <string>

namespace mgad {

/// Broad failure class; the CLI maps each onto an exit status.
enum class ErrorKind {
  Config,  // exit 2
  Data,    // exit 3
  Numeric, // exit 4
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, std::string module, const std::string& what)
      : std::runtime_error(module + ": " + what), kind_(kind), module_(std::move(module)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& module() const noexcept { return module_; }

private:
  ErrorKind kind_;
  std::string module_;
};

// ingest
struct FormatError : Error {
  explicit FormatError(const std::string& w) : Error(ErrorKind::Data, "ingest", w) {}
};
struct SchemaError : Error {
  explicit SchemaError(const std::string& w) : Error(ErrorKind::Data, "ingest", w) {}
};
struct OrderingError : Error {
  explicit OrderingError(const std::string& w) : Error(ErrorKind::Data, "ingest", w) {}
};
struct CellError : Error {
  CellError(std::size_t row, std::size_t col, const std::string& w)
      : Error(ErrorKind::Data, "ingest", "row " + std::to_string(row) + ", column " + std::to_string(col) + ": " + w),
        row(row), column(col) {}
  std::size_t row;
  std::size_t column;
};
struct InsufficientDataError : Error {
  explicit InsufficientDataError(const std::string& w) : Error(ErrorKind::Data, "ingest", w) {}
};

// corrnet
struct DegenerateAssetError : Error {
  explicit DegenerateAssetError(const std::string& asset)
      : Error(ErrorKind::Data, "corrnet", "asset '" + asset + "' has zero variance"), asset(asset) {}
  std::string asset;
};

// autoencoder
struct ConfigError : Error {
  ConfigError(std::string module, const std::string& w) : Error(ErrorKind::Config, std::move(module), w) {}
};
struct InputError : Error {
  explicit InputError(const std::string& w) : Error(ErrorKind::Data, "autoencoder", w) {}
};
struct ShapeError : Error {
  ShapeError(std::string module, const std::string& w) : Error(ErrorKind::Data, std::move(module), w) {}
};
struct DivergenceError : Error {
  DivergenceError(int epoch, const std::string& w)
      : Error(ErrorKind::Numeric, "autoencoder", "epoch " + std::to_string(epoch) + ": " + w), epoch(epoch) {}
  int epoch;
};

// anomaly
struct DistributionError : Error {
  explicit DistributionError(const std::string& w) : Error(ErrorKind::Data, "anomaly", w) {}
};
struct DomainError : Error {
  explicit DomainError(const std::string& w) : Error(ErrorKind::Numeric, "anomaly", w) {}
};
struct DegenerateScoreError : Error {
  explicit DegenerateScoreError(const std::string& w) : Error(ErrorKind::Data, "anomaly", w) {}
};

// stats
struct TestError : Error {
  explicit TestError(const std::string& w) : Error(ErrorKind::Data, "stats", w) {}
};

struct IoError : Error {
  IoError(const std::string& path, const std::string& w) : Error(ErrorKind::Data, "io", path + ": " + w), path(path) {}
  std::string path;
};

} // namespace mgad
