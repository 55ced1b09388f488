#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "avtk/classify.hpp"
#include "avtk/features.hpp"
#include "avtk/prnn.hpp"
#include "avtk/simkit.hpp"
#include "avtk/te.hpp"

namespace avtk {

enum class MethodKind { TransformationEncoder, Baseline, Prnn };

/// "te+<classifier>", "baseline:<classifier>" or "prnn".
struct Method {
  MethodKind kind = MethodKind::TransformationEncoder;
  ClassifierKind classifier = ClassifierKind::GNB;

  std::string tag() const;
  static Method parse(std::string_view text);
};

struct EvalMode {
  std::size_t folds = 0;  // 0 = holdout

  bool holdout() const { return folds == 0; }
  std::string tag() const;
  static EvalMode parse(std::string_view text);  // "holdout" or "cv:<k>"
};

/// Everything that determines a run. Built from key=value text; see
/// RunConfig::keys() for the accepted keys.
struct RunConfig {
  std::string data;   // dataset for cv runs and model training
  std::string train;  // holdout training set
  std::string test;   // holdout test set
  std::string truth;  // optional truth file for a PAN directory
  Method method;
  std::vector<FeatureConfig> features = all_configs(ValueKind::TermFrequency);
  std::size_t window = 10;
  bool augment = false;
  TETrainSpec te;
  PRNNTrainSpec prnn;
  ClassifierSpec classifier;
  SimilarityParams similarity;
  EvalMode eval;
  std::uint64_t seed = 0;
  std::filesystem::path out = "avtk-out";
  std::size_t threads = 0;  // 0 = AVTK_THREADS or hardware

  /// Accepted keys with one-line descriptions, in canonical order.
  static const std::vector<std::pair<std::string, std::string>>& keys();

  /// Sets one key from its text form. Throws ConfigError.
  void set(const std::string& key, const std::string& value);
  /// Text form of a key's current value.
  std::string get(const std::string& key) const;

  /// "key = value" lines in canonical order.
  std::string canonical() const;
  /// FNV-1a of canonical() without the output directory and thread count,
  /// as 16 hex digits.
  std::string hash() const;

  std::size_t resolved_threads() const;
  /// Seeds handed to the submodules, derived from `seed`.
  std::uint64_t te_seed() const;
  std::uint64_t prnn_seed() const;
  std::uint64_t classifier_seed() const;
  std::uint64_t fold_seed() const;
};

/// Parses "key = value" lines ('#' starts a comment) on top of `base`.
RunConfig parse_config_text(const std::string& text, RunConfig base = {});
RunConfig load_config_file(const std::filesystem::path& path, RunConfig base = {});

std::string fnv1a_hex(std::string_view text);

}  // namespace avtk
