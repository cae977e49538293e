#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

namespace mgad {

enum class Activation : std::uint8_t { Tanh, Sigmoid };

/// Hyperparameters for a (k, hidden, bottleneck, hidden, k) autoencoder.
struct TrainConfig {
  int epochs = 500;
  double learning_rate = 0.1;
  std::uint64_t seed = 0;
  int bottleneck_dim = 32;
  int hidden_dim = 128;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

/// Default (hidden, bottleneck) sizes for input width k: (128, 32) from k = 256
/// upward, otherwise (ceil(k/4), ceil(k/16)) nudged so that bottleneck < hidden < k.
std::pair<int, int> default_architecture(int k);

/// Throws ConfigError unless epochs > 0, learning_rate >= 0 and bottleneck < hidden < k.
void validate(const TrainConfig& cfg, int k);

/// Dense mirrored autoencoder. Layer l maps layer_dims[l] -> layer_dims[l+1];
/// hidden layers use tanh, the output layer a sigmoid.
struct AutoencoderModel {
  std::vector<int> layer_dims;
  std::vector<Eigen::MatrixXd> weights; // weights[l]: layer_dims[l+1] x layer_dims[l]
  std::vector<Eigen::VectorXd> biases;
  std::vector<Activation> activations;

  std::size_t layer_count() const { return weights.size(); }
  int input_dim() const { return layer_dims.front(); }
  /// Index of the bottleneck layer output (the encoder's last layer).
  std::size_t bottleneck_layer() const { return layer_count() / 2 - 1; }
  std::size_t parameter_count() const;

  friend bool operator==(const AutoencoderModel&, const AutoencoderModel&) = default;
};

/// Builds a model from explicit dimensions with zero parameters.
AutoencoderModel make_model(std::vector<int> layer_dims);

/// Glorot-uniform weights from mt19937_64(cfg.seed), zero biases.
AutoencoderModel init_model(int k, const TrainConfig& cfg);

struct ForwardResult {
  Eigen::VectorXd latent;
  Eigen::VectorXd reconstruction;
};

ForwardResult forward(const AutoencoderModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Column-wise reconstruction of a k x N batch.
Eigen::MatrixXd reconstruct(const AutoencoderModel& model, const Eigen::Ref<const Eigen::MatrixXd>& batch);

/// (1/k) * sum |x_j - y_j|^2.
double mse_loss(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y);

struct Gradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
};

/// Mean MSE over the rows of `rows` (N x k) and its exact gradient.
std::pair<double, Gradients> loss_and_gradient(const AutoencoderModel& model,
                                               const Eigen::Ref<const Eigen::MatrixXd>& rows);

/// Mean MSE over the rows of `rows` without the gradient.
double mean_loss(const AutoencoderModel& model, const Eigen::Ref<const Eigen::MatrixXd>& rows);

struct TrainTrace {
  std::vector<double> loss; // pre-update loss per epoch
};

/// Full-batch gradient descent on mean MSE. `rows` is N x k, one sample per row.
std::pair<AutoencoderModel, TrainTrace> train(AutoencoderModel model, const Eigen::Ref<const Eigen::MatrixXd>& rows,
                                              const TrainConfig& cfg);

/// Per-row MSE between each row and its reconstruction.
Eigen::VectorXd reconstruction_errors(const AutoencoderModel& model, const Eigen::Ref<const Eigen::MatrixXd>& rows);

/// Parameters in checkpoint order: per layer, weights row-major then biases.
Eigen::VectorXd flatten_parameters(const AutoencoderModel& model);
void assign_parameters(AutoencoderModel& model, const Eigen::Ref<const Eigen::VectorXd>& flat);

/// Checkpoint layout (all integers and floats little-endian):
///   "MGAE" | u32 version (1) | u32 n | n x u32 layer_dims | parameters as f64
void write_model(const AutoencoderModel& model, std::ostream& out);
AutoencoderModel read_model(std::istream& in);

void write_trace_csv(const TrainTrace& trace, std::ostream& out);

} // namespace mgad
