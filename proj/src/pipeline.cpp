#include "avtk/pipeline.hpp"

#include <filesystem>
#include <sstream>

#include "avtk/diag.hpp"
#include "avtk/error.hpp"
#include "avtk/parallel.hpp"
#include "avtk/rng.hpp"
#include "avtk/simkit.hpp"
#include "avtk/te.hpp"

namespace avtk {

bool SyntheticSource::matches(std::string_view source) {
  return source == "synthetic" || source.starts_with("synthetic:");
}

SyntheticSource SyntheticSource::parse(std::string_view source) {
  if (!matches(source)) {
    throw ConfigError("not a synthetic source: '" + std::string(source) + "'");
  }
  SyntheticSource out;
  std::string body(source.size() > 10 ? source.substr(10) : std::string_view{});
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("synthetic spec: expected key=value, got '" + item + "'");
    }
    const std::string key = item.substr(0, eq);
    std::size_t value = 0;
    try {
      std::size_t used = 0;
      value = std::stoull(item.substr(eq + 1), &used);
      if (used != item.size() - eq - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ConfigError("synthetic spec: bad value in '" + item + "'");
    }
    auto& c = out.corpus;
    if (key == "authors") {
      c.authors = value;
    } else if (key == "docs") {
      c.docs_per_author = value;
    } else if (key == "sentences") {
      c.sentences_per_doc = value;
    } else if (key == "words") {
      c.words_per_sentence = value;
    } else if (key == "vocab") {
      c.vocab_per_author = value;
    } else if (key == "shared") {
      c.shared_words = value;
    } else if (key == "seed") {
      c.seed = value;
    } else if (key == "pairs") {
      out.pairs_per_class = value;
    } else {
      throw ConfigError("synthetic spec: unknown key '" + key + "'");
    }
  }
  return out;
}

std::vector<ProblemPair> load_dataset(const std::string& source,
                                      const std::string& truth) {
  if (source.empty()) throw ConfigError("no dataset given");
  if (SyntheticSource::matches(source)) {
    const auto spec = SyntheticSource::parse(source);
    return generate_pairs(spec.corpus, spec.pairs_per_class);
  }
  if (std::filesystem::is_directory(source)) {
    return load_pan_directory(source, truth.empty()
                                          ? std::nullopt
                                          : std::optional<std::filesystem::path>(truth));
  }
  return load_pairs_jsonl(source);
}

std::vector<std::string> FeatureRecipe::column_names() const {
  std::vector<std::string> names;
  for (const auto& c : configs) {
    if (kind == MethodKind::TransformationEncoder) {
      names.push_back(config_name(c));
    } else {
      for (auto m : kAllMetrics) {
        names.push_back(config_name(c) + "/" + std::string(metric_name(m)));
      }
    }
  }
  return names;
}

FeatureRecipe recipe_from(const RunConfig& config) {
  if (config.method.kind == MethodKind::Prnn) {
    throw InvalidArgument("prnn does not use a feature recipe");
  }
  FeatureRecipe r;
  r.kind = config.method.kind;
  r.configs = config.features;
  r.window = config.window;
  r.te = config.te;
  r.te.rng_seed = config.te_seed();
  r.similarity = config.similarity;
  return r;
}

std::vector<RawRow> compute_feature_rows(const FeatureRecipe& recipe,
                                         std::span<const ProblemPair> pairs,
                                         std::size_t threads) {
  std::vector<RawRow> rows(pairs.size());
  parallel_for(pairs.size(), threads, [&](std::size_t i) {
    if (recipe.kind == MethodKind::TransformationEncoder) {
      rows[i] = te_error_vector(pairs[i], recipe.configs, recipe.window, recipe.te).errors;
    } else {
      const auto values =
          problem_summary_vector(pairs[i], recipe.configs, recipe.similarity);
      rows[i].assign(values.begin(), values.end());
    }
  });
  return rows;
}

std::vector<int> binary_labels(std::span<const ProblemPair> pairs) {
  std::vector<int> y;
  y.reserve(pairs.size());
  for (const auto& p : pairs) {
    if (!p.labeled()) throw InvalidArgument("pair " + p.id + " is unlabeled");
    y.push_back(p.label == Label::Same ? 1 : 0);
  }
  return y;
}

namespace {

FeatureMatrix select_columns(const std::vector<RawRow>& rows,
                             const std::vector<std::size_t>& kept) {
  FeatureMatrix x;
  x.reserve(rows.size());
  bool imputed = false;
  for (const auto& row : rows) {
    FeatureRow r;
    r.reserve(kept.size());
    for (auto c : kept) {
      if (row.at(c)) {
        r.push_back(*row[c]);
      } else {
        r.push_back(0.0);
        imputed = true;
      }
    }
    x.push_back(std::move(r));
  }
  if (imputed) diag::warn("missing feature values replaced by 0");
  return x;
}

}  // namespace

TrainedModel fit_method(const RunConfig& config, std::span<const ProblemPair> train,
                        const std::vector<RawRow>* rows) {
  TrainedModel model;
  model.method = config.method;
  model.config_hash = config.hash();
  const auto y = binary_labels(train);

  if (config.method.kind == MethodKind::Prnn) {
    PRNNTrainSpec spec = config.prnn;
    spec.rng_seed = mix_seed(config.prnn_seed(), 1);
    PrnnBundle bundle;
    bundle.max_length = spec.max_sequence_length;
    bundle.network = init_prnn(collect_vocabulary(train), spec.shape, config.prnn_seed(),
                               spec.pretrained_embeddings);
    bundle.network.fusion = config.similarity;
    prnn_train(bundle.network, train, spec);
    model.body = std::move(bundle);
    return model;
  }

  FeatureModel fm;
  fm.recipe = recipe_from(config);
  std::vector<RawRow> computed;
  if (!rows) {
    computed = compute_feature_rows(fm.recipe, train, config.resolved_threads());
    rows = &computed;
  }
  if (rows->size() != train.size()) {
    throw InvalidArgument("fit_method: feature rows do not match the pairs");
  }
  const std::size_t width = rows->empty() ? 0 : rows->front().size();
  for (std::size_t c = 0; c < width; ++c) {
    bool complete = true;
    for (const auto& r : *rows) complete = complete && r.at(c).has_value();
    if (complete) {
      fm.kept_columns.push_back(c);
    } else {
      diag::warn("feature column " + std::to_string(c) +
                 " is missing for some training pairs; dropped");
    }
  }
  if (fm.kept_columns.empty()) {
    throw InvalidArgument("no feature column is available for every training pair");
  }
  ClassifierSpec spec = config.classifier;
  spec.kind = config.method.classifier;
  spec.seed = config.classifier_seed();
  fm.classifier = fit(spec, select_columns(*rows, fm.kept_columns), y);
  model.body = std::move(fm);
  return model;
}

TrainedModel fit_encoder(const RunConfig& config, const ProblemPair& pair) {
  TrainedModel model;
  model.method = config.method;
  model.config_hash = config.hash();
  EncoderBundle bundle;
  bundle.pair_id = pair.id;
  bundle.config = config.features.front();
  bundle.window = config.window;
  bundle.vocabulary = build_vocabulary(expand_all(pair.source_docs, config.window),
                                       bundle.config);
  const auto data = te_problem_data(pair, bundle.config, config.window);
  TETrainSpec spec = config.te;
  spec.rng_seed = mix_seed(config.te_seed(), 0);
  bundle.encoder = te_train(data.sources, data.target, spec).model;
  model.body = std::move(bundle);
  return model;
}

std::vector<double> encoder_errors(const EncoderBundle& bundle,
                                   std::span<const ProblemPair> pairs) {
  std::vector<double> out;
  for (const auto& pair : pairs) {
    std::vector<Eigen::VectorXd> sources;
    for (const auto& w : expand_all(pair.source_docs, bundle.window)) {
      auto v = extract(w, bundle.vocabulary);
      sources.push_back(v.nonzeros() ? normalize_unit_interval(v).to_dense()
                                     : v.to_dense());
    }
    std::vector<SparseVector> targets;
    for (const auto& w : expand_all(pair.target_docs, bundle.window)) {
      auto v = extract(w, bundle.vocabulary);
      targets.push_back(v.nonzeros() ? normalize_unit_interval(v) : v);
    }
    out.push_back(te_mean_error(bundle.encoder, sources,
                                average_vector(targets).to_dense()));
  }
  return out;
}

FoldOutput predict_method(const TrainedModel& model, std::span<const ProblemPair> pairs,
                          std::size_t threads, const std::vector<RawRow>* rows) {
  FoldOutput out;
  if (const auto* bundle = std::get_if<PrnnBundle>(&model.body)) {
    for (const auto& p : prnn_predict(bundle->network, pairs, bundle->max_length)) {
      out.labels.push_back(p.label == Label::Same ? 1 : 0);
      out.scores.push_back(p.p_same);
    }
    return out;
  }
  if (std::holds_alternative<EncoderBundle>(model.body)) {
    throw InvalidArgument("an encoder file scores pairs but does not classify them");
  }
  const auto& fm = std::get<FeatureModel>(model.body);
  std::vector<RawRow> computed;
  if (!rows) {
    computed = compute_feature_rows(fm.recipe, pairs, threads);
    rows = &computed;
  }
  auto pred = predict(fm.classifier, select_columns(*rows, fm.kept_columns));
  out.labels = std::move(pred.labels);
  out.scores = std::move(pred.scores);
  return out;
}

namespace {

template <typename T>
std::vector<T> subset(std::span<const T> items, std::span<const std::size_t> idx) {
  std::vector<T> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(items[i]);
  return out;
}

}  // namespace

ExperimentResult run_experiment(const RunConfig& config) {
  const std::size_t threads = config.resolved_threads();
  const bool feature_method = config.method.kind != MethodKind::Prnn;
  ExperimentResult result;
  std::optional<FeatureRecipe> recipe;
  if (feature_method) {
    recipe = recipe_from(config);
    result.column_names = recipe->column_names();
  }
  auto record_rows = [&](std::span<const ProblemPair> pairs,
                         const std::vector<RawRow>& rows) {
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      result.feature_rows.push_back({pairs[i].id, pairs[i].label, rows[i]});
    }
  };

  if (config.eval.holdout()) {
    if (config.train.empty() || config.test.empty()) {
      throw ConfigError("holdout evaluation needs both train and test");
    }
    auto train = load_dataset(config.train, config.truth);
    const auto test = load_dataset(config.test, config.truth);
    if (config.augment) train = augment_by_halving(train);
    const auto y_test = binary_labels(test);

    std::vector<RawRow> train_rows, test_rows;
    if (feature_method) {
      train_rows = compute_feature_rows(*recipe, train, threads);
      test_rows = compute_feature_rows(*recipe, test, threads);
      record_rows(train, train_rows);
      record_rows(test, test_rows);
    }
    TrainedModel model = fit_method(config, train, feature_method ? &train_rows : nullptr);
    const FoldOutput out =
        predict_method(model, test, threads, feature_method ? &test_rows : nullptr);
    std::vector<HeldOut> held;
    for (std::size_t i = 0; i < test.size(); ++i) {
      held.push_back({i, test[i].id, y_test[i], out.labels[i], out.scores[i], 0});
    }
    result.report = make_report(std::move(held));
    result.model = std::move(model);
    return result;
  }

  const auto pairs = load_dataset(config.data.empty() ? config.train : config.data,
                                  config.truth);
  const auto y = binary_labels(pairs);
  std::vector<std::string> ids;
  for (const auto& p : pairs) ids.push_back(p.id);

  std::vector<RawRow> rows;
  if (feature_method) {
    rows = compute_feature_rows(*recipe, pairs, threads);
    record_rows(pairs, rows);
  }
  const std::span<const ProblemPair> all(pairs);
  const std::span<const RawRow> all_rows(rows);
  FoldPipeline pipeline = [&](std::span<const std::size_t> train_idx,
                              std::span<const std::size_t> test_idx, std::size_t) {
    auto train = subset(all, train_idx);
    const auto test = subset(all, test_idx);
    if (!feature_method) {
      if (config.augment) train = augment_by_halving(train);
      const TrainedModel model = fit_method(config, train);
      return predict_method(model, test, 1);
    }
    const auto test_rows = subset(all_rows, test_idx);
    if (config.augment) {
      train = augment_by_halving(train);
      const TrainedModel model = fit_method(config, train);
      return predict_method(model, test, 1, &test_rows);
    }
    const auto train_rows = subset(all_rows, train_idx);
    const TrainedModel model = fit_method(config, train, &train_rows);
    return predict_method(model, test, 1, &test_rows);
  };
  result.report = kfold_cv(y, ids, config.eval.folds, config.fold_seed(), pipeline, threads);
  return result;
}

}  // namespace avtk
