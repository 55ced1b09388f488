#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "avtk/corpus.hpp"
#include "avtk/rng.hpp"
#include "avtk/simkit.hpp"

namespace avtk {

inline constexpr const char* kUnknownToken = "<unk>";
inline constexpr const char* kSeparatorToken = "</s>";

/// Parallel recurrent network. Both columns (source and target) run the
/// same parameters:
///   h_t = tanh(W_hh h_{t-1} + W_hx x_t + b),   o = c + W_ho h_T
/// The two final outputs are compared by the seven fusion metrics and the
/// fusion vector is classified with a softmax layer.
struct PRNNModel {
  std::vector<std::string> tokens;  // column -> token; 0 is <unk>, 1 is </s>
  std::unordered_map<std::string, std::uint32_t> token_index;
  Eigen::MatrixXd embeddings;  // d_E x V
  Eigen::MatrixXd w_hh;        // H x H
  Eigen::MatrixXd w_hx;        // H x d_E
  Eigen::MatrixXd w_ho;        // O x H
  Eigen::VectorXd b;           // H
  Eigen::VectorXd c;           // O
  Eigen::MatrixXd w_s;         // 2 x 7, row 0 scores "same author"
  Eigen::VectorXd b_s;         // 2
  SimilarityParams fusion;

  std::size_t embed_dim() const { return static_cast<std::size_t>(embeddings.rows()); }
  std::size_t hidden_dim() const { return static_cast<std::size_t>(w_hh.rows()); }
  std::size_t output_dim() const { return static_cast<std::size_t>(w_ho.rows()); }
  std::size_t vocab_size() const { return tokens.size(); }

  /// Embedding column of a token, <unk> when absent.
  std::uint32_t lookup(const std::string& token) const;
  std::vector<std::uint32_t> lookup(std::span<const std::string> sequence) const;

  friend bool operator==(const PRNNModel& a, const PRNNModel& b);
};

struct PRNNShape {
  std::size_t embed_dim = 50;
  std::size_t hidden_dim = 64;
  /// Recurrent output size; 0 means hidden_dim.
  std::size_t output_dim = 0;
};

/// "token v1 ... v_dE" per line.
std::unordered_map<std::string, Eigen::VectorXd> load_embeddings(
    const std::filesystem::path& path, std::size_t embed_dim);

/// Embeddings come from `pretrained` where the token matches, else
/// U[0,1) per component; weights U[-sqrt(6/(fan_in+fan_out)), +]; biases 0.
PRNNModel init_prnn(const std::vector<std::string>& vocab, const PRNNShape& shape,
                    std::uint64_t seed,
                    const std::optional<std::filesystem::path>& pretrained = std::nullopt);

/// Distinct tokens of every document in `pairs`, in first-occurrence order.
std::vector<std::string> collect_vocabulary(std::span<const ProblemPair> pairs);

/// Tokens of one side: documents joined with </s>, cut after `max_length`.
std::vector<std::string> side_tokens(const std::vector<Document>& docs,
                                     std::size_t max_length);

/// Output at the last time step. Throws on an empty sequence.
Eigen::VectorXd rnn_encode(const PRNNModel& model,
                           std::span<const std::string> tokens);
Eigen::VectorXd rnn_encode_ids(const PRNNModel& model,
                               std::span<const std::uint32_t> ids);

enum class Mode { Train, Eval };

/// Inverted dropout: in train mode each component is zeroed with
/// probability `rate` and survivors are scaled by 1/(1-rate).
Eigen::VectorXd dropout(const Eigen::VectorXd& v, double rate, Mode mode, Rng& rng);

/// Per-component multipliers (0 or 1/(1-rate)) for one dropout draw.
Eigen::VectorXd dropout_mask(std::size_t size, double rate, Rng& rng);

struct PairProbabilities {
  double p_same = 0.5;
  double p_diff = 0.5;
};

/// `rng` is used only in train mode.
PairProbabilities prnn_forward(const PRNNModel& model, const ProblemPair& pair,
                               Mode mode, double dropout_rate, Rng& rng,
                               std::size_t max_length = 1000);

/// Gradient of -log p(label) for one example, every tensor included.
struct PRNNGradient {
  std::map<std::uint32_t, Eigen::VectorXd> embeddings;  // touched columns
  Eigen::MatrixXd w_hh, w_hx, w_ho, w_s;
  Eigen::VectorXd b, c, b_s;
  double loss = 0.0;
};

/// Loss and gradient of one encoded pair. Masks multiply the recurrent
/// outputs of the source and target columns; pass nullptr for no dropout.
PRNNGradient prnn_gradient(const PRNNModel& model,
                           std::span<const std::uint32_t> source,
                           std::span<const std::uint32_t> target, Label label,
                           const Eigen::VectorXd* source_mask = nullptr,
                           const Eigen::VectorXd* target_mask = nullptr);

struct PRNNTrainSpec {
  std::size_t epochs = 20;
  double learning_rate = 0.001;
  std::size_t batch_size = 1;
  double dropout_rate = 0.2;
  /// Rescales any step whose gradient norm over all tensors exceeds this;
  /// 0 disables clipping.
  double clip_norm = 0.0;
  std::uint64_t rng_seed = 0;
  std::size_t max_sequence_length = 1000;
  PRNNShape shape;
  std::optional<std::filesystem::path> pretrained_embeddings;

  void validate() const;
};

/// SGD over labeled pairs, one step per pair, epoch order shuffled by the
/// seed. Returns the mean loss of each epoch.
std::vector<double> prnn_train(PRNNModel& model, std::span<const ProblemPair> pairs,
                               const PRNNTrainSpec& spec);

struct PairPrediction {
  Label label = Label::Unknown;
  double p_same = 0.5;
};

/// Eval-mode predictions; Same iff p_same >= 0.5.
std::vector<PairPrediction> prnn_predict(const PRNNModel& model,
                                         std::span<const ProblemPair> pairs,
                                         std::size_t max_length = 1000);

}  // namespace avtk
