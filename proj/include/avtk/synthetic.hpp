#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "avtk/corpus.hpp"

namespace avtk {

/// Seeded multi-author corpus. Each author writes from a private content
/// vocabulary (disjoint across authors) plus an optional shared pool of
/// function words, with Zipf-like word frequencies.
struct SyntheticCorpusSpec {
  std::size_t authors = 2;
  std::size_t docs_per_author = 50;
  std::size_t sentences_per_doc = 20;
  std::size_t words_per_sentence = 8;
  std::size_t vocab_per_author = 20;
  std::size_t shared_words = 0;
  std::uint64_t seed = 7;
};

std::map<std::string, std::vector<Document>> generate_corpus(
    const SyntheticCorpusSpec& spec);

/// Balanced labeled pairs (n_per_class positives and negatives) drawn from a
/// generated corpus.
std::vector<ProblemPair> generate_pairs(const SyntheticCorpusSpec& spec,
                                        std::size_t n_per_class);

/// One problem whose target reuses `shared_fraction` of the source
/// vocabulary; the remaining target words are foreign to the source.
struct OverlapProblemSpec {
  std::size_t source_vocab = 100;
  double shared_fraction = 0.8;
  std::size_t sentences = 30;
  std::size_t words_per_sentence = 8;
  Label label = Label::Same;
  std::uint64_t seed = 1;
};

ProblemPair generate_overlap_problem(const OverlapProblemSpec& spec,
                                     std::string id);

/// Deterministic pronounceable word for an integer (distinct for distinct
/// inputs).
std::string synthetic_word(std::size_t index);

}  // namespace avtk
