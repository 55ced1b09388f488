#include <doctest.h>

#include "avtk/corpus.hpp"
#include "avtk/diag.hpp"
#include "avtk/error.hpp"
#include "avtk/features.hpp"
#include "avtk/rng.hpp"

using namespace avtk;

namespace {

const FeatureConfig kWordTf{FeatureSet::WordUnigram, ValueKind::TermFrequency};

std::vector<double> dense(const SparseVector& v) {
  const Eigen::VectorXd d = v.to_dense();
  return {d.data(), d.data() + d.size()};
}

}  // namespace

TEST_CASE("seven feature sets, two value kinds") {
  CHECK(kAllFeatureSets.size() == 7);
  CHECK(all_configs(ValueKind::Boolean).size() == 7);
  for (const auto& c : all_configs(ValueKind::Boolean)) {
    CHECK(parse_config_name(config_name(c)) == c);
  }
  CHECK(config_name(kWordTf) == "word1:tf");
}

TEST_CASE("build_vocabulary") {
  const Document ab = make_document("s", "a b");
  CHECK(build_vocabulary(std::vector<Document>{ab}, kWordTf).dimension() == 2);

  const Document chars = make_document("s", "ab cd");
  const FeatureConfig c4{FeatureSet::Char4gram, ValueKind::TermFrequency};
  const auto v = build_vocabulary(std::vector<Document>{chars}, c4);
  CHECK(v.features() == std::vector<std::string>{"ab c", "b cd"});

  const auto one = build_vocabulary(std::vector<Document>{ab}, kWordTf);
  const auto two = build_vocabulary(std::vector<Document>{ab, ab}, kWordTf);
  CHECK(one.features() == two.features());

  const Document empty = make_document("e", "");
  CHECK_THROWS_AS(build_vocabulary(std::vector<Document>{empty}, kWordTf), EmptyVocabulary);
}

TEST_CASE("word n-grams stay inside sentences") {
  const Document d = make_document("d", "a b. c d.");
  const auto grams = feature_strings(d, FeatureSet::WordBigram);
  CHECK(grams == std::vector<std::string>{"a b", "b .", "c d", "d ."});
}

TEST_CASE("extract filters target-only features") {
  const auto vocab =
      build_vocabulary(std::vector<Document>{make_document("s", "a b")}, kWordTf);
  const auto v = extract(make_document("t", "b c"), vocab);
  CHECK(dense(v) == std::vector<double>{0.0, 1.0});

  const auto counts = extract(make_document("t", "a a b"), vocab);
  CHECK(dense(counts) == std::vector<double>{2.0, 1.0});

  const FeatureConfig boolean{FeatureSet::WordUnigram, ValueKind::Boolean};
  const Document doc = make_document("d", "x y x z");
  const auto bvocab = build_vocabulary(std::vector<Document>{doc}, boolean);
  for (double x : dense(extract(doc, bvocab))) CHECK(x == 1.0);
}

TEST_CASE("extract properties on random text") {
  Rng rng(17);
  const std::vector<std::string> words{"a", "b", "c", "d", "e", "f", "the", "running"};
  auto random_text = [&](std::size_t n) {
    std::string s;
    for (std::size_t i = 0; i < n; ++i) {
      s += words[rng.index(words.size())];
      s += rng.bernoulli(0.2) ? ". " : " ";
    }
    return s + ".";
  };
  for (int trial = 0; trial < 20; ++trial) {
    const std::string s = random_text(30), t1 = random_text(20), t2 = random_text(25);
    for (FeatureSet set : kAllFeatureSets) {
      const FeatureConfig tf{set, ValueKind::TermFrequency};
      const FeatureConfig bl{set, ValueKind::Boolean};
      const auto vocab = build_vocabulary(std::vector<Document>{make_document("s", s)}, tf);
      const auto bvocab = build_vocabulary(std::vector<Document>{make_document("s", s)}, bl);
      const Document d1 = make_document("t1", t1), d2 = make_document("t2", t2);
      const auto e1 = extract(d1, vocab);
      for (const auto& [col, val] : e1.entries()) {
        CHECK(col < vocab.dimension());
        CHECK(val > 0.0);
      }
      // Boolean extraction is the indicator of term frequency.
      const auto b1 = extract(d1, bvocab);
      CHECK(b1.dimension() == e1.dimension());
      for (std::uint32_t c = 0; c < e1.dimension(); ++c) {
        CHECK(b1.get(c) == (e1.get(c) > 0.0 ? 1.0 : 0.0));
      }
      // Concatenating sentence-aligned documents adds their counts.
      if (set != FeatureSet::Char4gram) {
        std::vector<std::string> both = d1.sentences;
        both.insert(both.end(), d2.sentences.begin(), d2.sentences.end());
        const Document joined = document_from_sentences("j", both);
        CHECK(extract(joined, vocab) == add(e1, extract(d2, vocab)));
      }
    }
  }
}

TEST_CASE("normalize_unit_interval") {
  CHECK(dense(normalize_unit_interval(SparseVector(2, {{0, 2.0}, {1, 4.0}}))) ==
        std::vector<double>{0.5, 1.0});
  const SparseVector b(3, {{0, 1.0}, {2, 1.0}});
  CHECK(normalize_unit_interval(b) == b);
  CHECK(dense(normalize_unit_interval(SparseVector(1, {{0, 3.0}}))) ==
        std::vector<double>{1.0});
  const SparseVector v(4, {{1, 5.0}, {3, 2.0}});
  CHECK(normalize_unit_interval(normalize_unit_interval(v)) == normalize_unit_interval(v));

  diag::CaptureWarnings warnings;
  const SparseVector zero(3);
  CHECK(normalize_unit_interval(zero) == zero);
  CHECK(warnings.count() == 1);
}

TEST_CASE("average_vector") {
  const std::vector<SparseVector> a{SparseVector(2, {{0, 1.0}}), SparseVector(2, {{1, 1.0}})};
  CHECK(dense(average_vector(a)) == std::vector<double>{0.5, 0.5});
  const SparseVector v(3, {{0, 0.25}, {2, 3.0}});
  CHECK(average_vector(std::vector<SparseVector>{v}) == v);
  CHECK(average_vector(std::vector<SparseVector>{v, v, v}) == v);
  const std::vector<SparseVector> c{SparseVector(2, {{0, 2.0}}), SparseVector(2),
                                    SparseVector(2, {{0, 1.0}})};
  CHECK(dense(average_vector(c)) == std::vector<double>{1.0, 0.0});
  const std::vector<SparseVector> mismatch{SparseVector(2), SparseVector(3)};
  CHECK_THROWS_AS(average_vector(mismatch), InvalidArgument);
}

TEST_CASE("builtin POS tagger") {
  const auto& tagger = builtin_tagger();
  auto one = [&](const std::string& w) {
    const std::vector<std::string> t{w};
    return tagger.tag(t)[0];
  };
  CHECK(one("the") == PosTag::Det);
  CHECK(one("quickly") == PosTag::Adv);
  CHECK(one("flibbertigib") == PosTag::Noun);
  CHECK(one("walking") == PosTag::Verb);
  CHECK(one("nation") == PosTag::Noun);
  CHECK(one("42") == PosTag::Num);
  CHECK(one(",") == PosTag::Punct);
  const std::vector<std::string> many{"she", "ran", "to", "the", "store", "."};
  CHECK(tagger.tag(many).size() == many.size());
}
