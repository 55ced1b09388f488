#include "avtk/eval.hpp"

#include <algorithm>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "avtk/error.hpp"
#include "avtk/parallel.hpp"
#include "avtk/rng.hpp"

namespace avtk {

double accuracy(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.size() != truth.size()) {
    throw InvalidArgument("accuracy: length mismatch");
  }
  if (truth.empty()) throw InvalidArgument("accuracy: no examples");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i];
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

double roc_auc(std::span<const double> scores, std::span<const int> truth) {
  if (scores.size() != truth.size()) throw InvalidArgument("roc_auc: length mismatch");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Mann-Whitney U from midranks of tied groups.
  double positives = 0, negatives = 0, rank_sum = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (truth[order[k]] == 1) {
        positives += 1;
        rank_sum += midrank;
      } else {
        negatives += 1;
      }
    }
    i = j;
  }
  if (positives == 0 || negatives == 0) {
    throw InvalidArgument("roc_auc: undefined with a single class");
  }
  return (rank_sum - positives * (positives + 1) / 2.0) / (positives * negatives);
}

double score_metric(double accuracy, double auc) { return accuracy * auc; }

Confusion confusion(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.size() != truth.size()) {
    throw InvalidArgument("confusion: length mismatch");
  }
  Confusion c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == 1) {
      (predicted[i] == 1 ? c.tp : c.fn)++;
    } else {
      (predicted[i] == 1 ? c.fp : c.tn)++;
    }
  }
  return c;
}

EvalReport make_report(std::vector<HeldOut> predictions) {
  std::vector<int> truth, labels;
  std::vector<double> scores;
  for (const auto& p : predictions) {
    truth.push_back(p.truth);
    labels.push_back(p.predicted);
    scores.push_back(p.score);
  }
  EvalReport r;
  r.accuracy = accuracy(labels, truth);
  r.auc = roc_auc(scores, truth);
  r.score = score_metric(r.accuracy, r.auc);
  r.confusion = confusion(labels, truth);
  r.predictions = std::move(predictions);
  return r;
}

FoldPlan make_fold_plan(std::span<const int> labels, std::size_t k,
                        std::uint64_t seed) {
  if (k < 2) throw InvalidArgument("k-fold needs k >= 2");
  if (labels.size() < k) {
    throw InvalidArgument("k-fold needs at least k examples");
  }
  FoldPlan plan{k, seed, std::vector<std::size_t>(labels.size(), 0)};
  Rng rng(seed);
  std::size_t position = 0;
  for (int cls : {0, 1}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == cls) members.push_back(i);
    }
    rng.shuffle(std::span(members));
    for (auto i : members) plan.assignment[i] = position++ % k;
  }
  return plan;
}

EvalReport kfold_cv(std::span<const int> labels, std::span<const std::string> ids,
                    std::size_t k, std::uint64_t seed, const FoldPipeline& pipeline,
                    std::size_t threads) {
  const FoldPlan plan = make_fold_plan(labels, k, seed);
  for (int cls : {0, 1}) {
    const auto members = std::count(labels.begin(), labels.end(), cls);
    if (static_cast<std::size_t>(members) < k) {
      throw InvalidArgument("fold degeneracy: class " + std::to_string(cls) +
                            " has fewer than k=" + std::to_string(k) + " examples");
    }
  }

  std::vector<std::vector<HeldOut>> fold_out(k);
  parallel_for(k, threads, [&](std::size_t fold) {
    std::vector<std::size_t> train, test;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      (plan.assignment[i] == fold ? test : train).push_back(i);
    }
    const FoldOutput out = pipeline(train, test, fold);
    if (out.labels.size() != test.size() || out.scores.size() != test.size()) {
      throw InvalidArgument("fold pipeline returned the wrong number of predictions");
    }
    for (std::size_t j = 0; j < test.size(); ++j) {
      const std::size_t i = test[j];
      fold_out[fold].push_back({i, ids.empty() ? std::to_string(i) : ids[i],
                                labels[i], out.labels[j], out.scores[j], fold});
    }
  });

  std::vector<HeldOut> pooled;
  std::vector<FoldReport> folds;
  double sum_acc = 0, sum_auc = 0, sum_score = 0;
  for (std::size_t fold = 0; fold < k; ++fold) {
    const EvalReport fr = make_report(fold_out[fold]);
    folds.push_back({fold, fold_out[fold].size(), fr.accuracy, fr.auc, fr.score,
                     fr.confusion});
    sum_acc += fr.accuracy;
    sum_auc += fr.auc;
    sum_score += fr.score;
    pooled.insert(pooled.end(), fold_out[fold].begin(), fold_out[fold].end());
  }
  std::sort(pooled.begin(), pooled.end(),
            [](const HeldOut& a, const HeldOut& b) { return a.index < b.index; });
  EvalReport report = make_report(std::move(pooled));
  report.per_fold = std::move(folds);
  const double kk = static_cast<double>(k);
  report.fold_mean_accuracy = sum_acc / kk;
  report.fold_mean_auc = sum_auc / kk;
  report.fold_mean_score = sum_score / kk;
  return report;
}

}  // namespace avtk
