#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "avtk/corpus.hpp"
#include "avtk/diag.hpp"
#include "avtk/error.hpp"
#include "avtk/synthetic.hpp"

using namespace avtk;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("avtk_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
}

Document numbered(std::size_t n) {
  std::vector<std::string> sentences;
  for (std::size_t i = 0; i < n; ++i) sentences.push_back("s" + std::to_string(i) + ".");
  return document_from_sentences("doc", sentences);
}

}  // namespace

TEST_CASE("split_sentences") {
  CHECK(split_sentences("A. B! C?") == std::vector<std::string>{"A.", "B!", "C?"});
  CHECK(split_sentences("").empty());
  CHECK(split_sentences("Dr. Smith left.").size() == 2);
  SplitOptions opts;
  opts.abbreviations.insert("dr");
  CHECK(split_sentences("Dr. Smith left.", opts) == std::vector<std::string>{"Dr. Smith left."});
  CHECK(split_sentences("one\n\n\ntwo") == std::vector<std::string>{"one", "two"});
  CHECK(split_sentences("3.14 is pi. ok") == std::vector<std::string>{"3.14 is pi.", "ok"});
}

TEST_CASE("tokenize splits punctuation and lowercases") {
  CHECK(tokenize("Hello, World!") ==
        std::vector<std::string>{"hello", ",", "world", "!"});
  CHECK(tokenize("  don't  ") == std::vector<std::string>{"don", "'", "t"});
  CHECK(tokenize("").empty());
}

TEST_CASE("utf8_units keeps multibyte code points whole") {
  const auto units = utf8_units("a\xC3\xA9z");
  CHECK(units == std::vector<std::string>{"a", "\xC3\xA9", "z"});
}

TEST_CASE("make_document keeps retained content") {
  const Document d = make_document("x", "First one.  Second one!\n\nThird");
  CHECK(d.sentences.size() == 3);
  std::string joined;
  for (const auto& s : d.sentences) {
    CHECK_FALSE(s.empty());
    joined += s;
  }
  std::string original;
  for (char c : d.text) {
    if (!std::isspace(static_cast<unsigned char>(c))) original += c;
  }
  std::string compact;
  for (char c : joined) {
    if (!std::isspace(static_cast<unsigned char>(c))) compact += c;
  }
  CHECK(compact == original);
}

TEST_CASE("expand_document examples") {
  CHECK(expand_document(numbered(12), 10).size() == 3);
  const auto same = expand_document(numbered(10), 10);
  REQUIRE(same.size() == 1);
  CHECK(same[0].sentences == numbered(10).sentences);
  const auto short_doc = expand_document(numbered(5), 10);
  REQUIRE(short_doc.size() == 1);
  CHECK(short_doc[0].sentences == numbered(5).sentences);
  CHECK_THROWS_AS(expand_document(numbered(3), 0), InvalidArgument);
}

TEST_CASE("expand_document law holds exhaustively for n, l <= 50") {
  for (std::size_t n = 1; n <= 50; ++n) {
    const Document doc = numbered(n);
    for (std::size_t l = 1; l <= 50; ++l) {
      const auto windows = expand_document(doc, l);
      if (l > n) {
        REQUIRE(windows.size() == 1);
        continue;
      }
      REQUIRE(windows.size() == n - l + 1);
      for (std::size_t k = 0; k < windows.size(); ++k) {
        REQUIRE(windows[k].sentences.size() == l);
        for (std::size_t j = 0; j < l; ++j) {
          REQUIRE(windows[k].sentences[j] == doc.sentences[k + j]);
        }
        if (k > 0) {
          // Adjacent windows share l - 1 sentences.
          std::size_t shared = 0;
          for (std::size_t j = 1; j < l; ++j) {
            shared += windows[k - 1].sentences[j] == windows[k].sentences[j - 1];
          }
          REQUIRE(shared == l - 1);
        }
      }
    }
  }
}

TEST_CASE("load_pairs_jsonl") {
  const fs::path dir = scratch_dir("jsonl");
  const fs::path path = dir / "pairs.jsonl";
  std::string text;
  for (int i = 0; i < 10; ++i) {
    text += "{\"id\":\"p" + std::to_string(i) +
            "\",\"source\":[\"A b.\",\"C d.\"],\"target\":\"E f.\",\"label\":" +
            (i % 3 == 0 ? "\"Y\"" : i % 3 == 1 ? "\"N\"" : "null") + "}\n";
  }
  write_file(path, text);
  const auto pairs = load_pairs_jsonl(path);
  REQUIRE(pairs.size() == 10);
  for (int i = 0; i < 10; ++i) CHECK(pairs[i].id == "p" + std::to_string(i));
  CHECK(pairs[0].label == Label::Same);
  CHECK(pairs[1].label == Label::Different);
  CHECK(pairs[2].label == Label::Unknown);
  CHECK(pairs[0].source_docs.size() == 2);
  CHECK(pairs[0].target_docs.size() == 1);

  const fs::path copy = dir / "copy.jsonl";
  save_pairs_jsonl(pairs, copy);
  const auto again = load_pairs_jsonl(copy);
  REQUIRE(again.size() == pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    CHECK(again[i].label == pairs[i].label);
    CHECK(again[i].source_docs[1].text == pairs[i].source_docs[1].text);
  }

  write_file(path, text.substr(0, text.find('\n') + 1) + "{not json\n");
  try {
    load_pairs_jsonl(path);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  write_file(path, "{\"id\":\"a\",\"source\":[\"x\"],\"target\":\"y\",\"label\":\"maybe\"}\n");
  CHECK_THROWS_AS(load_pairs_jsonl(path), SchemaError);
  fs::remove_all(dir);
}

TEST_CASE("load_pan_directory") {
  const fs::path dir = scratch_dir("pan");
  write_file(dir / "EN001" / "known01.txt", "One. Two.");
  write_file(dir / "EN001" / "known02.txt", "Three.");
  write_file(dir / "EN001" / "unknown.txt", "Four.");
  for (int k = 1; k <= 5; ++k) {
    write_file(dir / "EN002" / ("known0" + std::to_string(k) + ".txt"), "Text.");
  }
  write_file(dir / "EN002" / "unknown.txt", "\xEF\xBB\xBFOther.");

  auto pairs = load_pan_directory(dir);
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[0].label == Label::Unknown);
  CHECK(pairs[1].source_docs.size() == 5);
  CHECK(pairs[1].target_docs[0].text == "Other.");

  write_file(dir / "truth.txt", "EN001 Y\nEN002 N\nEN999 Y\n");
  diag::CaptureWarnings warnings;
  pairs = load_pan_directory(dir);
  CHECK(warnings.count() == 1);
  CHECK(pairs[0].id == "EN001");
  CHECK(pairs[0].source_docs.size() == 2);
  CHECK(pairs[0].target_docs.size() == 1);
  CHECK(pairs[0].label == Label::Same);
  CHECK(pairs[1].label == Label::Different);

  write_file(dir / "EN003" / "known01.txt", "x.");
  CHECK_THROWS_AS(load_pan_directory(dir), StructureError);
  fs::remove_all(dir);
}

TEST_CASE("build_pair_schema counts") {
  SyntheticCorpusSpec spec;
  spec.authors = 20;
  spec.docs_per_author = 9;
  spec.sentences_per_doc = 1;
  const auto corpus = generate_corpus(spec);
  PairSchemaSpec schema;
  schema.rng_seed = 3;
  const auto pairs = build_pair_schema(corpus, schema);
  std::size_t positives = 0;
  for (const auto& p : pairs) positives += p.label == Label::Same;
  CHECK(positives == 720);
  CHECK(pairs.size() == 1440);

  // Brute-force a * C(d, 2) for small grids.
  for (std::size_t a = 2; a <= 5; ++a) {
    for (std::size_t d = 2; d <= 5; ++d) {
      std::map<std::string, std::vector<Document>> small;
      for (std::size_t i = 0; i < a; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
          small["a" + std::to_string(i)].push_back(
              make_document("a" + std::to_string(i) + "d" + std::to_string(j), "x."));
        }
      }
      std::size_t expected = 0;
      for (const auto& [_, docs] : small) {
        for (std::size_t x = 0; x < docs.size(); ++x) {
          for (std::size_t y = x + 1; y < docs.size(); ++y) ++expected;
        }
      }
      PairSchemaSpec s;
      s.n_negative = 0;
      const auto out = build_pair_schema(small, s);
      CHECK(out.size() == expected);
    }
  }

  PairSchemaSpec too_many;
  too_many.n_positive = 721;
  CHECK_THROWS_AS(build_pair_schema(corpus, too_many), CapacityError);

  const auto again = build_pair_schema(corpus, schema);
  REQUIRE(again.size() == pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) CHECK(again[i].id == pairs[i].id);
}

TEST_CASE("two authors with two documents give two positives") {
  std::map<std::string, std::vector<Document>> docs{
      {"a", {make_document("a1", "x."), make_document("a2", "y.")}},
      {"b", {make_document("b1", "z."), make_document("b2", "w.")}}};
  PairSchemaSpec s;
  s.n_negative = 0;
  CHECK(build_pair_schema(docs, s).size() == 2);
}

TEST_CASE("augment_by_halving") {
  ProblemPair p;
  p.id = "p";
  p.source_docs.push_back(numbered(9));
  p.source_docs[0].id = "s";
  p.target_docs.push_back(numbered(4));
  p.target_docs[0].id = "t";
  p.label = Label::Different;
  const auto out = augment_by_halving({p});
  REQUIRE(out.size() == 4);
  std::set<std::string> ids;
  for (const auto& q : out) {
    CHECK(q.label == Label::Different);
    ids.insert(q.id);
    const auto& s = q.source_docs[0];
    const auto& t = q.target_docs[0];
    CHECK(s.id.substr(0, 1) != t.id.substr(0, 1));
  }
  CHECK(ids.size() == 4);
  CHECK(out[0].source_docs[0].sentence_count() == 5);
  CHECK(out[3].source_docs[0].sentence_count() == 4);

  ProblemPair tiny = p;
  tiny.target_docs[0] = numbered(1);
  diag::CaptureWarnings warnings;
  const auto passed = augment_by_halving({tiny});
  CHECK(passed.size() == 1);
  CHECK(warnings.count() == 1);
}

TEST_CASE("synthetic generator contract") {
  SyntheticCorpusSpec spec;
  const auto pairs = generate_pairs(spec, 50);
  REQUIRE(pairs.size() == 100);
  std::size_t positives = 0;
  for (const auto& p : pairs) positives += p.label == Label::Same;
  CHECK(positives == 50);

  // Disjoint author vocabularies.
  const auto corpus = generate_corpus(spec);
  std::vector<std::set<std::string>> words;
  for (const auto& [_, docs] : corpus) {
    std::set<std::string> w;
    for (const auto& d : docs) {
      for (const auto& t : d.tokens) {
        if (std::isalpha(static_cast<unsigned char>(t[0]))) w.insert(t);
      }
    }
    words.push_back(w);
  }
  REQUIRE(words.size() == 2);
  for (const auto& w : words[0]) CHECK(words[1].count(w) == 0);

  const fs::path dir = scratch_dir("synth");
  save_pairs_jsonl(pairs, dir / "a.jsonl");
  save_pairs_jsonl(generate_pairs(spec, 50), dir / "b.jsonl");
  std::ifstream a(dir / "a.jsonl"), b(dir / "b.jsonl");
  const std::string ta((std::istreambuf_iterator<char>(a)), {});
  const std::string tb((std::istreambuf_iterator<char>(b)), {});
  CHECK(ta == tb);
  fs::remove_all(dir);
}
