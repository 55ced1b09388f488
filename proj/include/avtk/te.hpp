#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "avtk/corpus.hpp"
#include "avtk/features.hpp"

namespace avtk {

/// Transformation encoder with a tied decoder:
///   h = sigmoid(W^T x + b),  z = sigmoid(W h + b_out)
struct TEModel {
  Eigen::MatrixXd weights;   // d x d'
  Eigen::VectorXd bias;      // d'
  Eigen::VectorXd bias_out;  // d

  std::size_t input_dim() const { return static_cast<std::size_t>(weights.rows()); }
  std::size_t hidden_dim() const { return static_cast<std::size_t>(weights.cols()); }

  friend bool operator==(const TEModel& a, const TEModel& b) {
    return a.weights == b.weights && a.bias == b.bias && a.bias_out == b.bias_out;
  }
};

/// ceil(d / 2), at least 1.
std::size_t te_hidden_size(std::size_t input_dim);

/// Zero weights and biases of the shape implied by `input_dim`.
TEModel te_zero_model(std::size_t input_dim);

/// W ~ U[-sqrt(6/(d+d')), +sqrt(6/(d+d'))], biases zero.
TEModel te_init(std::size_t input_dim, std::uint64_t seed);

struct TEActivations {
  Eigen::VectorXd hidden;
  Eigen::VectorXd output;
};

TEActivations te_forward(const TEModel& model, const Eigen::VectorXd& source);

/// Cross-entropy -sum t log z + (1-t) log(1-z). Outputs at exactly 0 or 1
/// are clamped to [1e-12, 1 - 1e-12] with a warning.
double te_loss(const Eigen::VectorXd& target, const Eigen::VectorXd& output);

struct TEGradient {
  Eigen::MatrixXd weights;
  Eigen::VectorXd bias;
  Eigen::VectorXd bias_out;
  double loss = 0.0;
};

/// Loss of transforming `source` toward `target` and its gradient. The
/// weight gradient sums the encoder and decoder contributions.
TEGradient te_gradient(const TEModel& model, const Eigen::VectorXd& source,
                       const Eigen::VectorXd& target);

struct TETrainSpec {
  std::size_t epochs = 50;
  double learning_rate = 0.1;
  std::size_t batch_size = 1;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

struct TETrainResult {
  TEModel model;
  /// Mean per-example loss of each epoch, measured before each update.
  std::vector<double> loss_trace;
};

/// Plain SGD, one step per source vector, sources visited in order.
TETrainResult te_train(std::span<const Eigen::VectorXd> sources,
                       const Eigen::VectorXd& target, const TETrainSpec& spec);

/// Per-config transformation errors of one problem. A config whose source
/// vocabulary is empty has no error (std::nullopt).
struct TEErrorVector {
  std::vector<std::optional<double>> errors;

  std::size_t size() const { return errors.size(); }
  bool complete() const;
};

/// Vectors handed to the encoder for one problem under one config:
/// max-normalized source windows and the mean of the normalized target
/// windows, all over the source-window vocabulary.
struct TEProblemData {
  std::vector<Eigen::VectorXd> sources;
  Eigen::VectorXd target;
};

TEProblemData te_problem_data(const ProblemPair& pair, const FeatureConfig& config,
                              std::size_t window,
                              const PosTagger& tagger = builtin_tagger());

/// Mean loss of transforming each source into the target with a trained
/// model.
double te_mean_error(const TEModel& model, std::span<const Eigen::VectorXd> sources,
                     const Eigen::VectorXd& target);

/// Expands both sides with `window`, trains one fresh encoder per config and
/// records the mean post-training loss over the source windows.
TEErrorVector te_error_vector(const ProblemPair& pair,
                              std::span<const FeatureConfig> configs,
                              std::size_t window, const TETrainSpec& spec,
                              const PosTagger& tagger = builtin_tagger());

}  // namespace avtk
