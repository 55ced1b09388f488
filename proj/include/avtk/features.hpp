#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "avtk/corpus.hpp"

namespace avtk {

enum class FeatureSet {
  WordUnigram,
  WordBigram,
  WordTrigram,
  WordFourgram,
  PosUnigram,
  PosBigram,
  Char4gram,
};

enum class ValueKind { TermFrequency, Boolean };

inline constexpr std::array<FeatureSet, 7> kAllFeatureSets = {
    FeatureSet::WordUnigram, FeatureSet::WordBigram, FeatureSet::WordTrigram,
    FeatureSet::WordFourgram, FeatureSet::PosUnigram, FeatureSet::PosBigram,
    FeatureSet::Char4gram};

struct FeatureConfig {
  FeatureSet set = FeatureSet::WordUnigram;
  ValueKind value = ValueKind::TermFrequency;

  friend bool operator==(const FeatureConfig&, const FeatureConfig&) = default;
};

/// "word1", "word2", "word3", "word4", "pos1", "pos2", "char4".
std::string_view feature_set_name(FeatureSet set);
FeatureSet parse_feature_set(std::string_view name);
/// e.g. "word1:tf", "char4:bool".
std::string config_name(const FeatureConfig& config);
FeatureConfig parse_config_name(std::string_view name);

/// The seven feature sets under one value assignment.
std::vector<FeatureConfig> all_configs(ValueKind value);

// ---------------------------------------------------------------------------
// POS tagging

enum class PosTag { Noun, Verb, Adj, Adv, Pron, Det, Adp, Conj, Num, Prt, Punct, X };

std::string_view pos_tag_name(PosTag tag);

class PosTagger {
 public:
  virtual ~PosTagger() = default;
  /// One coarse tag per token.
  virtual std::vector<PosTag> tag(std::span<const std::string> tokens) const = 0;
};

/// Closed-class lexicon lookup followed by suffix heuristics; NOUN otherwise.
class BuiltinPosTagger final : public PosTagger {
 public:
  std::vector<PosTag> tag(std::span<const std::string> tokens) const override;
  static PosTag tag_one(std::string_view token);
};

const PosTagger& builtin_tagger();

// ---------------------------------------------------------------------------
// Sparse vectors

/// Non-negative feature values over a fixed number of columns.
class SparseVector {
 public:
  using Entry = std::pair<std::uint32_t, double>;

  SparseVector() = default;
  explicit SparseVector(std::size_t dimension) : dimension_(dimension) {}
  /// Entries need not be sorted; duplicate columns are summed.
  SparseVector(std::size_t dimension, std::vector<Entry> entries);

  std::size_t dimension() const { return dimension_; }
  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t nonzeros() const { return entries_.size(); }
  double get(std::uint32_t column) const;
  double max_value() const;

  Eigen::VectorXd to_dense() const;

  friend bool operator==(const SparseVector&, const SparseVector&) = default;

 private:
  std::size_t dimension_ = 0;
  std::vector<Entry> entries_;  // sorted by column, values non-zero
};

SparseVector add(const SparseVector& a, const SparseVector& b);

/// Divides every entry by the largest one. An all-zero vector is returned
/// unchanged and reported through diag::warn.
SparseVector normalize_unit_interval(const SparseVector& v);

/// Componentwise mean.
SparseVector average_vector(std::span<const SparseVector> vectors);

// ---------------------------------------------------------------------------
// Vocabulary and extraction

/// Feature strings of one document under a feature set, in text order.
/// Word and POS n-grams stay inside sentences; character 4-grams run over
/// the lowercased, space-normalized text.
std::vector<std::string> feature_strings(const Document& doc, FeatureSet set,
                                         const PosTagger& tagger = builtin_tagger());

class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(FeatureConfig config) : config_(config) {}

  const FeatureConfig& config() const { return config_; }
  std::size_t dimension() const { return features_.size(); }
  const std::vector<std::string>& features() const { return features_; }

  /// Column of a feature, or -1.
  std::int64_t find(std::string_view feature) const;
  /// Adds the feature if new and returns its column.
  std::uint32_t insert(const std::string& feature);

 private:
  FeatureConfig config_;
  std::vector<std::string> features_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

/// Every feature of the source documents, numbered by first occurrence.
/// Throws EmptyVocabulary when no document yields a feature.
Vocabulary build_vocabulary(std::span<const Document> source_docs,
                            const FeatureConfig& config,
                            const PosTagger& tagger = builtin_tagger());

/// Counts (or presence flags) of in-vocabulary features; everything else in
/// the document is dropped.
SparseVector extract(const Document& doc, const Vocabulary& vocab,
                     const PosTagger& tagger = builtin_tagger());

/// Feature vector of several documents read as one text.
SparseVector extract_joint(std::span<const Document> docs,
                           const Vocabulary& vocab,
                           const PosTagger& tagger = builtin_tagger());

}  // namespace avtk
