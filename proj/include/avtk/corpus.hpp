#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "avtk/text.hpp"

namespace avtk {

/// A unit of text with its sentence and token segmentation.
struct Document {
  std::string id;
  std::string text;
  std::vector<std::string> sentences;
  std::vector<std::string> tokens;

  std::size_t sentence_count() const { return sentences.size(); }
};

/// Segments `text` with the default splitter and tokenizes the sentences.
Document make_document(std::string id, std::string text);
Document make_document(std::string id, std::string text,
                       const SentenceSplitter& splitter);

/// Builds a document directly from already segmented sentences.
Document document_from_sentences(std::string id,
                                 std::vector<std::string> sentences);

enum class Label { Same, Different, Unknown };

const char* label_token(Label label);  // "Y", "N" or "null"

/// One verification problem: do the source and target share an author?
struct ProblemPair {
  std::string id;
  std::vector<Document> source_docs;
  std::vector<Document> target_docs;
  Label label = Label::Unknown;

  bool labeled() const { return label != Label::Unknown; }
};

/// Sliding window of `window` sentences, advancing one sentence per step.
/// A document shorter than the window is returned whole.
std::vector<Document> expand_document(const Document& doc, std::size_t window);

/// Expands every document and pools the windows in order.
std::vector<Document> expand_all(const std::vector<Document>& docs,
                                 std::size_t window);

/// Reads one pair per line:
/// {"id": ..., "source": [...], "target": ..., "label": "Y"|"N"|null}
std::vector<ProblemPair> load_pairs_jsonl(const std::filesystem::path& path);

/// Writes pairs in the format read by load_pairs_jsonl.
void save_pairs_jsonl(const std::vector<ProblemPair>& pairs,
                      const std::filesystem::path& path);

/// Reads a PAN-style tree: one folder per problem holding known*.txt and
/// unknown.txt. Labels come from `truth` ("<problem> <Y|N>" per line) when
/// given, else from <dir>/truth.txt when it exists.
std::vector<ProblemPair> load_pan_directory(
    const std::filesystem::path& dir,
    const std::optional<std::filesystem::path>& truth = std::nullopt);

struct PairSchemaSpec {
  std::size_t min_docs_per_author = 2;
  /// Positives to sample; unset keeps every same-author pair.
  std::optional<std::size_t> n_positive;
  /// Negatives to sample; unset means as many as positives (balanced).
  std::optional<std::size_t> n_negative;
  std::uint64_t rng_seed = 0;
};

/// Builds singleton-vs-singleton pairs: positives from same-author document
/// pairs, negatives from different-author pairs, each sampled without
/// replacement.
std::vector<ProblemPair> build_pair_schema(
    const std::map<std::string, std::vector<Document>>& docs_by_author,
    const PairSchemaSpec& spec);

/// Splits every document into two halves by sentence count and emits the
/// four cross pairs of each input pair.
std::vector<ProblemPair> augment_by_halving(
    const std::vector<ProblemPair>& pairs);

}  // namespace avtk
