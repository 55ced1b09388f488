#include "avtk/features.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

#include "avtk/diag.hpp"
#include "avtk/error.hpp"

namespace avtk {

std::string_view feature_set_name(FeatureSet set) {
  switch (set) {
    case FeatureSet::WordUnigram:
      return "word1";
    case FeatureSet::WordBigram:
      return "word2";
    case FeatureSet::WordTrigram:
      return "word3";
    case FeatureSet::WordFourgram:
      return "word4";
    case FeatureSet::PosUnigram:
      return "pos1";
    case FeatureSet::PosBigram:
      return "pos2";
    case FeatureSet::Char4gram:
      return "char4";
  }
  return "?";
}

FeatureSet parse_feature_set(std::string_view name) {
  for (auto set : kAllFeatureSets) {
    if (feature_set_name(set) == name) return set;
  }
  throw ConfigError("unknown feature set '" + std::string(name) + "'");
}

std::string config_name(const FeatureConfig& config) {
  std::string name(feature_set_name(config.set));
  name += config.value == ValueKind::TermFrequency ? ":tf" : ":bool";
  return name;
}

FeatureConfig parse_config_name(std::string_view name) {
  FeatureConfig config;
  const auto colon = name.find(':');
  config.set = parse_feature_set(name.substr(0, colon));
  if (colon != std::string_view::npos) {
    const auto kind = name.substr(colon + 1);
    if (kind == "tf") {
      config.value = ValueKind::TermFrequency;
    } else if (kind == "bool") {
      config.value = ValueKind::Boolean;
    } else {
      throw ConfigError("unknown value kind '" + std::string(kind) + "'");
    }
  }
  return config;
}

std::vector<FeatureConfig> all_configs(ValueKind value) {
  std::vector<FeatureConfig> out;
  for (auto set : kAllFeatureSets) out.push_back({set, value});
  return out;
}

// ---------------------------------------------------------------------------
// POS tagging

std::string_view pos_tag_name(PosTag tag) {
  static constexpr std::string_view kNames[] = {
      "NOUN", "VERB", "ADJ", "ADV", "PRON", "DET",
      "ADP",  "CONJ", "NUM", "PRT", "PUNCT", "X"};
  return kNames[static_cast<int>(tag)];
}

namespace {

const std::unordered_map<std::string_view, PosTag>& closed_class_lexicon() {
  static const auto* lexicon = [] {
    auto* m = new std::unordered_map<std::string_view, PosTag>;
    auto add = [m](std::initializer_list<std::string_view> words, PosTag tag) {
      for (auto w : words) m->emplace(w, tag);
    };
    add({"the", "a", "an", "this", "that", "these", "those", "every", "each",
         "some", "any", "no", "all", "both", "either", "neither", "another"},
        PosTag::Det);
    add({"i", "you", "he", "she", "it", "we", "they", "me", "him", "her",
         "us", "them", "my", "your", "his", "its", "our", "their", "mine",
         "yours", "ours", "theirs", "myself", "yourself", "himself",
         "herself", "itself", "ourselves", "themselves", "who", "whom",
         "whose", "which", "what", "someone", "something", "anyone",
         "anything", "everyone", "everything", "nobody", "nothing"},
        PosTag::Pron);
    add({"in", "on", "at", "by", "for", "with", "about", "against", "between",
         "into", "through", "during", "before", "after", "above", "below",
         "to", "from", "up", "down", "of", "off", "over", "under", "among",
         "around", "behind", "beside", "beyond", "near", "toward", "towards",
         "upon", "within", "without", "across", "along", "despite", "via"},
        PosTag::Adp);
    add({"and", "or", "but", "nor", "yet", "so", "because", "although",
         "though", "if", "while", "whereas", "unless", "whether"},
        PosTag::Conj);
    add({"not", "n't", "'s"}, PosTag::Prt);
    add({"is", "are", "was", "were", "be", "been", "being", "am", "have",
         "has", "had", "do", "does", "did", "will", "would", "shall", "should",
         "can", "could", "may", "might", "must"},
        PosTag::Verb);
    return m;
  }();
  return *lexicon;
}

bool has_suffix(std::string_view token, std::string_view suffix) {
  return token.size() > suffix.size() + 2 && token.ends_with(suffix);
}

}  // namespace

PosTag BuiltinPosTagger::tag_one(std::string_view token) {
  if (token.empty()) return PosTag::X;
  const auto& lexicon = closed_class_lexicon();
  if (auto it = lexicon.find(token); it != lexicon.end()) return it->second;

  bool all_punct = true, any_digit = false, digits_only = true,
       any_ascii_alnum = false;
  for (char c : token) {
    const auto u = static_cast<unsigned char>(c);
    const bool ascii = u < 0x80;
    if (!(ascii && std::ispunct(u))) all_punct = false;
    if (ascii && std::isdigit(u)) any_digit = true;
    if (ascii && std::isalnum(u)) any_ascii_alnum = true;
    if (!(ascii && (std::isdigit(u) || c == '.' || c == ','))) {
      digits_only = false;
    }
  }
  if (all_punct) return PosTag::Punct;
  if (any_digit && digits_only) return PosTag::Num;
  if (has_suffix(token, "ly")) return PosTag::Adv;
  if (has_suffix(token, "ing") || has_suffix(token, "ed")) return PosTag::Verb;
  if (has_suffix(token, "tion") || has_suffix(token, "ness") ||
      has_suffix(token, "ment")) {
    return PosTag::Noun;
  }
  if (has_suffix(token, "ous") || has_suffix(token, "ful") ||
      has_suffix(token, "able") || has_suffix(token, "ible") ||
      has_suffix(token, "less")) {
    return PosTag::Adj;
  }
  if (!any_ascii_alnum && static_cast<unsigned char>(token[0]) < 0x80) {
    return PosTag::X;
  }
  return PosTag::Noun;
}

std::vector<PosTag> BuiltinPosTagger::tag(
    std::span<const std::string> tokens) const {
  std::vector<PosTag> tags;
  tags.reserve(tokens.size());
  for (const auto& t : tokens) tags.push_back(tag_one(t));
  return tags;
}

const PosTagger& builtin_tagger() {
  static const BuiltinPosTagger tagger;
  return tagger;
}

// ---------------------------------------------------------------------------
// Sparse vectors

SparseVector::SparseVector(std::size_t dimension, std::vector<Entry> entries)
    : dimension_(dimension) {
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.first < b.first; });
  for (const auto& [col, value] : entries) {
    if (col >= dimension) {
      throw InvalidArgument("sparse column " + std::to_string(col) +
                            " outside dimension " + std::to_string(dimension));
    }
    if (!entries_.empty() && entries_.back().first == col) {
      entries_.back().second += value;
    } else {
      entries_.emplace_back(col, value);
    }
  }
  std::erase_if(entries_, [](const Entry& e) { return e.second == 0.0; });
}

double SparseVector::get(std::uint32_t column) const {
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), column,
      [](const Entry& e, std::uint32_t c) { return e.first < c; });
  return it != entries_.end() && it->first == column ? it->second : 0.0;
}

double SparseVector::max_value() const {
  double m = 0.0;
  for (const auto& e : entries_) m = std::max(m, e.second);
  return m;
}

Eigen::VectorXd SparseVector::to_dense() const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dimension_));
  for (const auto& [col, value] : entries_) out[col] = value;
  return out;
}

SparseVector add(const SparseVector& a, const SparseVector& b) {
  if (a.dimension() != b.dimension()) {
    throw InvalidArgument("sparse vector dimensions differ");
  }
  std::vector<SparseVector::Entry> entries = a.entries();
  entries.insert(entries.end(), b.entries().begin(), b.entries().end());
  return SparseVector(a.dimension(), std::move(entries));
}

SparseVector normalize_unit_interval(const SparseVector& v) {
  const double m = v.max_value();
  if (m <= 0.0) {
    diag::warn("normalizing an all-zero vector; left unchanged");
    return v;
  }
  std::vector<SparseVector::Entry> entries = v.entries();
  for (auto& e : entries) e.second /= m;
  return SparseVector(v.dimension(), std::move(entries));
}

SparseVector average_vector(std::span<const SparseVector> vectors) {
  if (vectors.empty()) throw InvalidArgument("average of an empty list");
  const std::size_t dim = vectors.front().dimension();
  std::vector<double> sum(dim, 0.0);
  for (const auto& v : vectors) {
    if (v.dimension() != dim) {
      throw InvalidArgument("average_vector: dimension mismatch");
    }
    for (const auto& [col, value] : v.entries()) sum[col] += value;
  }
  const double n = static_cast<double>(vectors.size());
  std::vector<SparseVector::Entry> entries;
  for (std::size_t c = 0; c < dim; ++c) {
    if (sum[c] != 0.0) entries.emplace_back(static_cast<std::uint32_t>(c), sum[c] / n);
  }
  return SparseVector(dim, std::move(entries));
}

// ---------------------------------------------------------------------------
// Vocabulary and extraction

namespace {

std::size_t ngram_order(FeatureSet set) {
  switch (set) {
    case FeatureSet::WordUnigram:
    case FeatureSet::PosUnigram:
      return 1;
    case FeatureSet::WordBigram:
    case FeatureSet::PosBigram:
      return 2;
    case FeatureSet::WordTrigram:
      return 3;
    case FeatureSet::WordFourgram:
    case FeatureSet::Char4gram:
      return 4;
  }
  return 1;
}

void append_ngrams(const std::vector<std::string>& units, std::size_t n,
                   std::string_view sep, std::vector<std::string>& out) {
  if (units.size() < n) return;
  for (std::size_t i = 0; i + n <= units.size(); ++i) {
    std::string gram = units[i];
    for (std::size_t k = 1; k < n; ++k) {
      gram.append(sep);
      gram.append(units[i + k]);
    }
    out.push_back(std::move(gram));
  }
}

}  // namespace

std::vector<std::string> feature_strings(const Document& doc, FeatureSet set,
                                         const PosTagger& tagger) {
  std::vector<std::string> out;
  const std::size_t n = ngram_order(set);
  switch (set) {
    case FeatureSet::Char4gram:
      append_ngrams(utf8_units(normalize_spacing(doc.text)), n, "", out);
      break;
    case FeatureSet::PosUnigram:
    case FeatureSet::PosBigram:
      for (const auto& sentence : doc.sentences) {
        const auto tokens = tokenize(sentence);
        std::vector<std::string> tags;
        for (auto t : tagger.tag(tokens)) tags.emplace_back(pos_tag_name(t));
        append_ngrams(tags, n, " ", out);
      }
      break;
    default:
      for (const auto& sentence : doc.sentences) {
        append_ngrams(tokenize(sentence), n, " ", out);
      }
      break;
  }
  return out;
}

std::int64_t Vocabulary::find(std::string_view feature) const {
  auto it = index_.find(std::string(feature));
  return it == index_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

std::uint32_t Vocabulary::insert(const std::string& feature) {
  auto [it, inserted] =
      index_.try_emplace(feature, static_cast<std::uint32_t>(features_.size()));
  if (inserted) features_.push_back(feature);
  return it->second;
}

Vocabulary build_vocabulary(std::span<const Document> source_docs,
                            const FeatureConfig& config,
                            const PosTagger& tagger) {
  if (source_docs.empty()) {
    throw InvalidArgument("build_vocabulary needs at least one document");
  }
  Vocabulary vocab(config);
  for (const auto& doc : source_docs) {
    for (const auto& f : feature_strings(doc, config.set, tagger)) {
      vocab.insert(f);
    }
  }
  if (vocab.dimension() == 0) {
    throw EmptyVocabulary("no " + config_name(config) +
                          " features in the source documents");
  }
  return vocab;
}

SparseVector extract(const Document& doc, const Vocabulary& vocab,
                     const PosTagger& tagger) {
  std::vector<SparseVector::Entry> entries;
  for (const auto& f : feature_strings(doc, vocab.config().set, tagger)) {
    const auto col = vocab.find(f);
    if (col >= 0) entries.emplace_back(static_cast<std::uint32_t>(col), 1.0);
  }
  SparseVector counts(vocab.dimension(), std::move(entries));
  if (vocab.config().value == ValueKind::TermFrequency) return counts;
  std::vector<SparseVector::Entry> flags = counts.entries();
  for (auto& e : flags) e.second = 1.0;
  return SparseVector(vocab.dimension(), std::move(flags));
}

SparseVector extract_joint(std::span<const Document> docs,
                           const Vocabulary& vocab, const PosTagger& tagger) {
  FeatureConfig tf_config = vocab.config();
  SparseVector sum(vocab.dimension());
  for (const auto& d : docs) sum = add(sum, extract(d, vocab, tagger));
  if (tf_config.value == ValueKind::TermFrequency) return sum;
  std::vector<SparseVector::Entry> flags = sum.entries();
  for (auto& e : flags) e.second = 1.0;
  return SparseVector(vocab.dimension(), std::move(flags));
}

}  // namespace avtk
