#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace avtk {

/// Fraction of positions where the labels agree.
double accuracy(std::span<const int> predicted, std::span<const int> truth);

/// Probability that a random positive scores above a random negative, ties
/// counting one half. Throws InvalidArgument when a class is missing.
double roc_auc(std::span<const double> scores, std::span<const int> truth);

/// Accuracy times AUC.
double score_metric(double accuracy, double auc);

struct Confusion {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  std::size_t total() const { return tp + fp + tn + fn; }
};

Confusion confusion(std::span<const int> predicted, std::span<const int> truth);

/// Held-out predictions of one example.
struct HeldOut {
  std::size_t index = 0;  // position in the evaluated dataset
  std::string id;
  int truth = 0;
  int predicted = 0;
  double score = 0.0;
  std::size_t fold = 0;
};

struct FoldReport {
  std::size_t fold = 0;
  std::size_t size = 0;
  double accuracy = 0.0;
  double auc = 0.0;
  double score = 0.0;
  Confusion confusion;
};

struct EvalReport {
  double accuracy = 0.0;
  double auc = 0.0;
  double score = 0.0;
  Confusion confusion;
  std::vector<FoldReport> per_fold;
  /// Means over folds (cross-validation only).
  std::optional<double> fold_mean_accuracy, fold_mean_auc, fold_mean_score;
  std::vector<HeldOut> predictions;
};

/// Pooled report over one set of predictions.
EvalReport make_report(std::vector<HeldOut> predictions);

/// Stratified assignment: each class is shuffled with the seed and dealt
/// round-robin, so fold sizes differ by at most one and every fold holds
/// both classes when each class has at least k members.
struct FoldPlan {
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> assignment;  // example -> fold
};

FoldPlan make_fold_plan(std::span<const int> labels, std::size_t k, std::uint64_t seed);

struct FoldOutput {
  std::vector<int> labels;
  std::vector<double> scores;
};

/// Trains on the first index list and predicts the second.
using FoldPipeline = std::function<FoldOutput(std::span<const std::size_t> train,
                                              std::span<const std::size_t> test,
                                              std::size_t fold)>;

/// k-fold cross-validation. Folds run on up to `threads` workers; the
/// report does not depend on the thread count. `ids` may be empty.
EvalReport kfold_cv(std::span<const int> labels, std::span<const std::string> ids,
                    std::size_t k, std::uint64_t seed, const FoldPipeline& pipeline,
                    std::size_t threads = 1);

}  // namespace avtk
