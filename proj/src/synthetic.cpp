#include "avtk/synthetic.hpp"

#include <cmath>

#include "avtk/error.hpp"
#include "avtk/rng.hpp"

namespace avtk {
namespace {

constexpr const char* kSyllables[] = {"ba", "ke", "di", "fo", "gu", "la",
                                      "me", "ni", "po", "ru", "sa", "te",
                                      "vi", "zo", "ha", "je", "mi", "no",
                                      "pu", "ri"};
constexpr std::size_t kSyllableCount = std::size(kSyllables);

// Zipf(1) sampler over `n` ranks.
class ZipfSampler {
 public:
  explicit ZipfSampler(std::size_t n) : cdf_(n) {
    double total = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      total += 1.0 / static_cast<double>(r + 1);
      cdf_[r] = total;
    }
    for (auto& c : cdf_) c /= total;
  }

  std::size_t draw(Rng& rng) const {
    const double u = rng.uniform01();
    std::size_t lo = 0, hi = cdf_.size() - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (cdf_[mid] > u) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
    return lo;
  }

 private:
  std::vector<double> cdf_;
};

std::string make_sentence(const std::vector<std::string>& words,
                          const ZipfSampler& zipf, std::size_t length,
                          Rng& rng) {
  static constexpr const char* kEnds[] = {".", ".", ".", "!", "?"};
  std::string s;
  for (std::size_t w = 0; w < length; ++w) {
    if (w) s.push_back(' ');
    s += words[zipf.draw(rng)];
  }
  s += kEnds[rng.index(std::size(kEnds))];
  return s;
}

Document make_text(std::string id, const std::vector<std::string>& words,
                   std::size_t sentences, std::size_t length, Rng& rng) {
  const ZipfSampler zipf(words.size());
  std::vector<std::string> out;
  for (std::size_t i = 0; i < sentences; ++i) {
    out.push_back(make_sentence(words, zipf, length, rng));
  }
  return document_from_sentences(std::move(id), std::move(out));
}

}  // namespace

std::string synthetic_word(std::size_t index) {
  std::string word;
  do {
    word += kSyllables[index % kSyllableCount];
    index /= kSyllableCount;
  } while (index > 0);
  // Length marker keeps encodings of different lengths distinct.
  return word + kSyllables[word.size() / 2 % kSyllableCount];
}

std::map<std::string, std::vector<Document>> generate_corpus(
    const SyntheticCorpusSpec& spec) {
  if (spec.authors == 0 || spec.vocab_per_author == 0 ||
      spec.sentences_per_doc == 0 || spec.words_per_sentence == 0) {
    throw InvalidArgument("synthetic corpus dimensions must be positive");
  }
  Rng rng(spec.seed);
  std::map<std::string, std::vector<Document>> corpus;
  for (std::size_t a = 0; a < spec.authors; ++a) {
    std::vector<std::string> words;
    for (std::size_t k = 0; k < spec.vocab_per_author; ++k) {
      words.push_back(synthetic_word(spec.shared_words +
                                     a * spec.vocab_per_author + k));
    }
    // Shared function words interleave with the author's content ranks.
    for (std::size_t k = 0; k < spec.shared_words; ++k) {
      words.insert(words.begin() + static_cast<std::ptrdiff_t>(
                                       std::min(2 * k, words.size())),
                   synthetic_word(k));
    }
    char name[32];
    std::snprintf(name, sizeof name, "author%02zu", a);
    auto& docs = corpus[name];
    for (std::size_t d = 0; d < spec.docs_per_author; ++d) {
      char id[48];
      std::snprintf(id, sizeof id, "%s-doc%03zu", name, d);
      docs.push_back(make_text(id, words, spec.sentences_per_doc,
                               spec.words_per_sentence, rng));
    }
  }
  return corpus;
}

std::vector<ProblemPair> generate_pairs(const SyntheticCorpusSpec& spec,
                                        std::size_t n_per_class) {
  PairSchemaSpec schema;
  schema.min_docs_per_author = 2;
  schema.n_positive = n_per_class;
  schema.n_negative = n_per_class;
  schema.rng_seed = mix_seed(spec.seed, 1);
  return build_pair_schema(generate_corpus(spec), schema);
}

ProblemPair generate_overlap_problem(const OverlapProblemSpec& spec,
                                     std::string id) {
  if (spec.shared_fraction < 0.0 || spec.shared_fraction > 1.0) {
    throw InvalidArgument("shared_fraction must lie in [0, 1]");
  }
  Rng rng(spec.seed);
  // Word indices are offset by the seed so that problems differ.
  const std::size_t base = static_cast<std::size_t>(rng.index(1000)) * 1000;
  std::vector<std::string> source_words;
  for (std::size_t k = 0; k < spec.source_vocab; ++k) {
    source_words.push_back(synthetic_word(base + k));
  }
  const auto shared = static_cast<std::size_t>(
      std::lround(spec.shared_fraction * static_cast<double>(spec.source_vocab)));
  std::vector<std::size_t> order(spec.source_vocab);
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  rng.shuffle(std::span(order));
  std::vector<std::string> target_words;
  for (std::size_t k = 0; k < shared; ++k) {
    target_words.push_back(source_words[order[k]]);
  }
  for (std::size_t k = shared; k < spec.source_vocab; ++k) {
    target_words.push_back(synthetic_word(base + spec.source_vocab + k));
  }
  rng.shuffle(std::span(target_words));

  ProblemPair pair;
  pair.id = std::move(id);
  pair.label = spec.label;
  pair.source_docs.push_back(make_text(pair.id + "/source", source_words,
                                       spec.sentences, spec.words_per_sentence,
                                       rng));
  pair.target_docs.push_back(make_text(pair.id + "/target", target_words,
                                       spec.sentences, spec.words_per_sentence,
                                       rng));
  return pair;
}

}  // namespace avtk
