#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "avtk/classify.hpp"
#include "avtk/config.hpp"
#include "avtk/corpus.hpp"
#include "avtk/eval.hpp"
#include "avtk/prnn.hpp"
#include "avtk/synthetic.hpp"
#include "avtk/te.hpp"

namespace avtk {

/// "synthetic:authors=2,docs=50,pairs=50,seed=7,sentences=20,words=8,vocab=20,shared=0"
/// (every key optional). `pairs` is the count per class.
struct SyntheticSource {
  SyntheticCorpusSpec corpus;
  std::size_t pairs_per_class = 50;

  static bool matches(std::string_view source);
  static SyntheticSource parse(std::string_view source);
};

/// Loads a JSONL file, a PAN directory or a synthetic spec.
std::vector<ProblemPair> load_dataset(const std::string& source,
                                      const std::string& truth = {});

/// How problems are turned into classifier rows.
struct FeatureRecipe {
  MethodKind kind = MethodKind::TransformationEncoder;  // or Baseline
  std::vector<FeatureConfig> configs;
  std::size_t window = 10;
  TETrainSpec te;
  SimilarityParams similarity;

  std::vector<std::string> column_names() const;
};

FeatureRecipe recipe_from(const RunConfig& config);

/// Missing entries mark feature configs with an empty source vocabulary.
using RawRow = std::vector<std::optional<double>>;

/// TE error vectors or summary vectors, one per pair, in parallel.
std::vector<RawRow> compute_feature_rows(const FeatureRecipe& recipe,
                                         std::span<const ProblemPair> pairs,
                                         std::size_t threads);

struct FeatureModel {
  FeatureRecipe recipe;
  std::vector<std::size_t> kept_columns;  // complete in every training row
  ClassifierModel classifier;
};

struct PrnnBundle {
  PRNNModel network;
  std::size_t max_length = 1000;
};

/// A single trained encoder together with the vocabulary it reads.
struct EncoderBundle {
  std::string pair_id;
  FeatureConfig config;
  std::size_t window = 10;
  Vocabulary vocabulary;
  TEModel encoder;
};

struct TrainedModel {
  Method method;
  std::string config_hash;
  std::variant<FeatureModel, PrnnBundle, EncoderBundle> body;
};

/// 1 for Same, 0 for Different; throws on unlabeled pairs.
std::vector<int> binary_labels(std::span<const ProblemPair> pairs);

/// Trains the configured method. `rows` may carry precomputed feature rows
/// of `train` (ignored for prnn).
TrainedModel fit_method(const RunConfig& config, std::span<const ProblemPair> train,
                        const std::vector<RawRow>* rows = nullptr);

/// Trains the encoder of one problem under the first configured feature set.
TrainedModel fit_encoder(const RunConfig& config, const ProblemPair& pair);

/// Mean transformation loss of each pair through a saved encoder, with the
/// pair represented over the encoder's vocabulary.
std::vector<double> encoder_errors(const EncoderBundle& bundle,
                                   std::span<const ProblemPair> pairs);

/// Labels (1 = same author) and class-1 scores.
FoldOutput predict_method(const TrainedModel& model, std::span<const ProblemPair> pairs,
                          std::size_t threads, const std::vector<RawRow>* rows = nullptr);

struct ExperimentResult {
  EvalReport report;
  std::vector<std::string> column_names;  // feature methods only
  struct Row {
    std::string id;
    Label label;
    RawRow values;
  };
  std::vector<Row> feature_rows;      // every pair whose features were computed
  std::optional<TrainedModel> model;  // holdout runs
};

/// Runs the configured pipeline end to end without touching the disk
/// beyond reading inputs.
ExperimentResult run_experiment(const RunConfig& config);

}  // namespace avtk
