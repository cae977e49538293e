#include "mgad/autoencoder.hpp"

#include "mgad/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <random>

namespace mgad {

namespace {

constexpr std::array<char, 4> kMagic{'M', 'G', 'A', 'E'};
constexpr std::uint32_t kVersion = 1;

Eigen::MatrixXd activate(Activation a, const Eigen::MatrixXd& z) {
  switch (a) {
  case Activation::Tanh:
    return z.array().tanh().matrix();
  case Activation::Sigmoid:
    return (1.0 / (1.0 + (-z.array()).exp())).matrix();
  }
  return z;
}

// Derivative expressed through the activation output.
Eigen::ArrayXXd activation_slope(Activation a, const Eigen::MatrixXd& out) {
  switch (a) {
  case Activation::Tanh:
    return 1.0 - out.array().square();
  case Activation::Sigmoid:
    return out.array() * (1.0 - out.array());
  }
  return Eigen::ArrayXXd::Ones(out.rows(), out.cols());
}

// Layer outputs for a k x N batch; element 0 is the input itself.
std::vector<Eigen::MatrixXd> forward_all(const AutoencoderModel& m, const Eigen::Ref<const Eigen::MatrixXd>& x) {
  std::vector<Eigen::MatrixXd> acts;
  acts.reserve(m.layer_count() + 1);
  acts.emplace_back(x);
  for (std::size_t l = 0; l < m.layer_count(); ++l) {
    Eigen::MatrixXd z = m.weights[l] * acts.back();
    z.colwise() += m.biases[l];
    acts.push_back(activate(m.activations[l], z));
  }
  return acts;
}

void check_rows(const AutoencoderModel& m, const Eigen::Ref<const Eigen::MatrixXd>& rows) {
  if (rows.cols() != m.input_dim())
    throw ShapeError("autoencoder", fmt::format("rows have width {}, model expects {}", rows.cols(), m.input_dim()));
  if (!rows.allFinite()) throw InputError("non-finite input");
}

template <typename T>
void put(std::ostream& out, T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    out.write(bytes.data(), bytes.size());
  } else {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }
}

template <typename T>
T get(std::istream& in) {
  std::array<char, sizeof(T)> bytes{};
  if (!in.read(bytes.data(), bytes.size())) throw FormatError("truncated model checkpoint");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  return std::bit_cast<T>(bytes);
}

} // namespace

std::pair<int, int> default_architecture(int k) {
  if (k >= 256) return {128, 32};
  int hidden = (k + 3) / 4;
  int bottleneck = (k + 15) / 16;
  hidden = std::max(hidden, 2);
  bottleneck = std::max(1, std::min(bottleneck, hidden - 1));
  return {hidden, bottleneck};
}

void validate(const TrainConfig& cfg, int k) {
  if (cfg.epochs <= 0) throw ConfigError("autoencoder", "epochs must be positive");
  if (!(cfg.learning_rate >= 0.0) || !std::isfinite(cfg.learning_rate))
    throw ConfigError("autoencoder", "learning_rate must be finite and non-negative");
  if (cfg.bottleneck_dim <= 0 || cfg.hidden_dim <= 0)
    throw ConfigError("autoencoder", "layer sizes must be positive");
  if (!(cfg.bottleneck_dim < cfg.hidden_dim && cfg.hidden_dim < k))
    throw ConfigError("autoencoder", fmt::format("need bottleneck ({}) < hidden ({}) < k ({})", cfg.bottleneck_dim,
                                                 cfg.hidden_dim, k));
}

std::size_t AutoencoderModel::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < layer_count(); ++l) n += static_cast<std::size_t>(weights[l].size() + biases[l].size());
  return n;
}

AutoencoderModel make_model(std::vector<int> layer_dims) {
  if (layer_dims.size() < 3 || layer_dims.size() % 2 == 0)
    throw ConfigError("autoencoder", "layer_dims must have an odd length of at least 3");
  for (std::size_t i = 0; i < layer_dims.size(); ++i) {
    if (layer_dims[i] <= 0) throw ConfigError("autoencoder", "layer sizes must be positive");
    if (layer_dims[i] != layer_dims[layer_dims.size() - 1 - i])
      throw ConfigError("autoencoder", "layer_dims must mirror around the bottleneck");
  }
  AutoencoderModel m;
  m.layer_dims = std::move(layer_dims);
  const std::size_t layers = m.layer_dims.size() - 1;
  for (std::size_t l = 0; l < layers; ++l) {
    m.weights.push_back(Eigen::MatrixXd::Zero(m.layer_dims[l + 1], m.layer_dims[l]));
    m.biases.push_back(Eigen::VectorXd::Zero(m.layer_dims[l + 1]));
    m.activations.push_back(l + 1 == layers ? Activation::Sigmoid : Activation::Tanh);
  }
  return m;
}

AutoencoderModel init_model(int k, const TrainConfig& cfg) {
  if (k < 2) throw ConfigError("autoencoder", "k must be at least 2");
  validate(cfg, k);
  auto m = make_model({k, cfg.hidden_dim, cfg.bottleneck_dim, cfg.hidden_dim, k});
  std::mt19937_64 rng(cfg.seed);
  for (auto& w : m.weights) {
    const double s = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
    std::uniform_real_distribution<double> dist(-s, s);
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = dist(rng);
  }
  return m;
}

ForwardResult forward(const AutoencoderModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != model.input_dim())
    throw ShapeError("autoencoder", fmt::format("input has length {}, model expects {}", x.size(), model.input_dim()));
  if (!x.allFinite()) throw InputError("non-finite input");
  const auto acts = forward_all(model, x);
  return {acts[model.bottleneck_layer() + 1].col(0), acts.back().col(0)};
}

Eigen::MatrixXd reconstruct(const AutoencoderModel& model, const Eigen::Ref<const Eigen::MatrixXd>& batch) {
  if (batch.rows() != model.input_dim())
    throw ShapeError("autoencoder", fmt::format("batch has height {}, model expects {}", batch.rows(), model.input_dim()));
  if (!batch.allFinite()) throw InputError("non-finite input");
  return forward_all(model, batch).back();
}

double mse_loss(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y) {
  if (x.size() != y.size())
    throw ShapeError("autoencoder", fmt::format("length mismatch {} vs {}", x.size(), y.size()));
  if (x.size() == 0) return 0.0;
  return (x - y).squaredNorm() / static_cast<double>(x.size());
}

double mean_loss(const AutoencoderModel& model, const Eigen::Ref<const Eigen::MatrixXd>& rows) {
  check_rows(model, rows);
  const Eigen::MatrixXd x = rows.transpose();
  const Eigen::MatrixXd y = forward_all(model, x).back();
  return (y - x).squaredNorm() / static_cast<double>(x.size());
}

std::pair<double, Gradients> loss_and_gradient(const AutoencoderModel& model,
                                               const Eigen::Ref<const Eigen::MatrixXd>& rows) {
  check_rows(model, rows);
  const Eigen::MatrixXd x = rows.transpose(); // k x N
  const auto acts = forward_all(model, x);
  const Eigen::MatrixXd diff = acts.back() - x;
  const double scale = 1.0 / static_cast<double>(x.size()); // 1/(k N)
  const double loss = diff.squaredNorm() * scale;

  const std::size_t L = model.layer_count();
  Gradients g;
  g.weights.resize(L);
  g.biases.resize(L);
  Eigen::MatrixXd delta = ((2.0 * scale) * diff.array() * activation_slope(model.activations[L - 1], acts[L])).matrix();
  for (std::size_t l = L; l-- > 0;) {
    g.weights[l] = delta * acts[l].transpose();
    g.biases[l] = delta.rowwise().sum();
    if (l > 0)
      delta = ((model.weights[l].transpose() * delta).array() * activation_slope(model.activations[l - 1], acts[l]))
                  .matrix();
  }
  return {loss, std::move(g)};
}

std::pair<AutoencoderModel, TrainTrace> train(AutoencoderModel model, const Eigen::Ref<const Eigen::MatrixXd>& rows,
                                              const TrainConfig& cfg) {
  validate(cfg, model.input_dim());
  check_rows(model, rows);
  TrainTrace trace;
  trace.loss.reserve(static_cast<std::size_t>(cfg.epochs));
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    auto [loss, grad] = loss_and_gradient(model, rows);
    if (!std::isfinite(loss)) throw DivergenceError(epoch, "non-finite loss");
    trace.loss.push_back(loss);
    for (std::size_t l = 0; l < model.layer_count(); ++l) {
      model.weights[l] -= cfg.learning_rate * grad.weights[l];
      model.biases[l] -= cfg.learning_rate * grad.biases[l];
    }
  }
  for (std::size_t l = 0; l < model.layer_count(); ++l)
    if (!model.weights[l].allFinite() || !model.biases[l].allFinite())
      throw DivergenceError(cfg.epochs, "non-finite parameters after training");
  return {std::move(model), std::move(trace)};
}

Eigen::VectorXd reconstruction_errors(const AutoencoderModel& model, const Eigen::Ref<const Eigen::MatrixXd>& rows) {
  check_rows(model, rows);
  const Eigen::MatrixXd x = rows.transpose();
  const Eigen::MatrixXd y = forward_all(model, x).back();
  return (y - x).colwise().squaredNorm().transpose() / static_cast<double>(x.rows());
}

Eigen::VectorXd flatten_parameters(const AutoencoderModel& model) {
  Eigen::VectorXd flat(static_cast<Eigen::Index>(model.parameter_count()));
  Eigen::Index p = 0;
  for (std::size_t l = 0; l < model.layer_count(); ++l) {
    const auto& w = model.weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) flat(p++) = w(r, c);
    for (Eigen::Index r = 0; r < model.biases[l].size(); ++r) flat(p++) = model.biases[l](r);
  }
  return flat;
}

void assign_parameters(AutoencoderModel& model, const Eigen::Ref<const Eigen::VectorXd>& flat) {
  if (static_cast<std::size_t>(flat.size()) != model.parameter_count())
    throw ShapeError("autoencoder", "parameter vector length does not match model");
  Eigen::Index p = 0;
  for (std::size_t l = 0; l < model.layer_count(); ++l) {
    auto& w = model.weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = flat(p++);
    for (Eigen::Index r = 0; r < model.biases[l].size(); ++r) model.biases[l](r) = flat(p++);
  }
}

void write_model(const AutoencoderModel& model, std::ostream& out) {
  out.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(model.layer_dims.size()));
  for (int d : model.layer_dims) put<std::uint32_t>(out, static_cast<std::uint32_t>(d));
  const auto flat = flatten_parameters(model);
  for (Eigen::Index i = 0; i < flat.size(); ++i) put<double>(out, flat(i));
}

AutoencoderModel read_model(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) throw FormatError("not a model checkpoint (bad magic)");
  const auto version = get<std::uint32_t>(in);
  if (version != kVersion) throw FormatError(fmt::format("unsupported checkpoint version {}", version));
  const auto n = get<std::uint32_t>(in);
  if (n > 64) throw FormatError("implausible layer count in checkpoint");
  std::vector<int> dims;
  for (std::uint32_t i = 0; i < n; ++i) dims.push_back(static_cast<int>(get<std::uint32_t>(in)));
  auto model = make_model(std::move(dims));
  Eigen::VectorXd flat(static_cast<Eigen::Index>(model.parameter_count()));
  for (Eigen::Index i = 0; i < flat.size(); ++i) flat(i) = get<double>(in);
  if (!flat.allFinite()) throw FormatError("checkpoint holds non-finite parameters");
  assign_parameters(model, flat);
  return model;
}

void write_trace_csv(const TrainTrace& trace, std::ostream& out) {
  out << "epoch,loss\n";
  for (std::size_t e = 0; e < trace.loss.size(); ++e) out << fmt::format("{},{}\n", e, trace.loss[e]);
}

} // namespace mgad
