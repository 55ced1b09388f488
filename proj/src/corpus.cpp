#include "avtk/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "avtk/diag.hpp"
#include "avtk/error.hpp"
#include "avtk/rng.hpp"

namespace avtk {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  if (text.starts_with("\xEF\xBB\xBF")) text.erase(0, 3);
  return text;
}

Label parse_label(const json& value, std::size_t line) {
  if (value.is_null()) return Label::Unknown;
  if (value.is_string()) {
    const auto& s = value.get_ref<const std::string&>();
    if (s == "Y") return Label::Same;
    if (s == "N") return Label::Different;
  }
  throw SchemaError("unknown label token " + value.dump() + " (line " +
                    std::to_string(line) + ")");
}

// Sentence-index slices [begin, end) of a document, re-tokenized.
Document slice(const Document& doc, std::size_t begin, std::size_t end,
               std::string id) {
  std::vector<std::string> sentences(doc.sentences.begin() + begin,
                                     doc.sentences.begin() + end);
  return document_from_sentences(std::move(id), std::move(sentences));
}

// Samples `count` of `total` indices without replacement, ascending.
std::vector<std::size_t> sample_indices(std::size_t total, std::size_t count,
                                        Rng& rng) {
  std::vector<std::size_t> idx(total);
  for (std::size_t i = 0; i < total; ++i) idx[i] = i;
  for (std::size_t i = 0; i < count; ++i) {
    std::swap(idx[i], idx[i + rng.index(total - i)]);
  }
  idx.resize(count);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace

Document make_document(std::string id, std::string text) {
  return make_document(std::move(id), std::move(text),
                       [](std::string_view t) { return split_sentences(t); });
}

Document make_document(std::string id, std::string text,
                       const SentenceSplitter& splitter) {
  Document doc;
  doc.id = std::move(id);
  doc.sentences = splitter(text);
  doc.text = std::move(text);
  for (const auto& s : doc.sentences) {
    auto toks = tokenize(s);
    doc.tokens.insert(doc.tokens.end(), std::make_move_iterator(toks.begin()),
                      std::make_move_iterator(toks.end()));
  }
  return doc;
}

Document document_from_sentences(std::string id,
                                 std::vector<std::string> sentences) {
  Document doc;
  doc.id = std::move(id);
  doc.text = join(sentences, " ");
  for (const auto& s : sentences) {
    auto toks = tokenize(s);
    doc.tokens.insert(doc.tokens.end(), std::make_move_iterator(toks.begin()),
                      std::make_move_iterator(toks.end()));
  }
  doc.sentences = std::move(sentences);
  return doc;
}

const char* label_token(Label label) {
  switch (label) {
    case Label::Same:
      return "Y";
    case Label::Different:
      return "N";
    case Label::Unknown:
      break;
  }
  return "null";
}

std::vector<Document> expand_document(const Document& doc,
                                      std::size_t window) {
  if (window == 0) throw InvalidArgument("expansion window must be >= 1");
  const std::size_t n = doc.sentence_count();
  if (n <= window) return {doc};
  std::vector<Document> out;
  out.reserve(n - window + 1);
  for (std::size_t k = 0; k + window <= n; ++k) {
    out.push_back(slice(doc, k, k + window, doc.id + "#w" + std::to_string(k)));
  }
  return out;
}

std::vector<Document> expand_all(const std::vector<Document>& docs,
                                 std::size_t window) {
  std::vector<Document> out;
  for (const auto& d : docs) {
    auto windows = expand_document(d, window);
    out.insert(out.end(), std::make_move_iterator(windows.begin()),
               std::make_move_iterator(windows.end()));
  }
  return out;
}

std::vector<ProblemPair> load_pairs_jsonl(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<ProblemPair> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(path.string() + ": " + e.what(), line_no);
    }
    auto fail = [&](const std::string& what) {
      throw SchemaError(path.string() + ": " + what + " (line " +
                        std::to_string(line_no) + ")");
    };
    if (!obj.is_object()) fail("expected a JSON object");
    if (!obj.contains("id") || !obj["id"].is_string()) fail("missing string id");
    if (!obj.contains("source") || !obj["source"].is_array() ||
        obj["source"].empty()) {
      fail("source must be a non-empty array of strings");
    }
    if (!obj.contains("target") || !obj["target"].is_string()) {
      fail("target must be a string");
    }
    ProblemPair pair;
    pair.id = obj["id"].get<std::string>();
    std::size_t i = 0;
    for (const auto& s : obj["source"]) {
      if (!s.is_string()) fail("source entries must be strings");
      pair.source_docs.push_back(make_document(
          pair.id + "/source" + std::to_string(i++), s.get<std::string>()));
    }
    pair.target_docs.push_back(
        make_document(pair.id + "/target", obj["target"].get<std::string>()));
    pair.label = parse_label(obj.value("label", json(nullptr)), line_no);
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

void save_pairs_jsonl(const std::vector<ProblemPair>& pairs,
                      const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& p : pairs) {
    if (p.target_docs.size() != 1) {
      throw InvalidArgument("pair " + p.id +
                            ": JSONL pairs hold exactly one target document");
    }
    json obj;
    obj["id"] = p.id;
    obj["source"] = json::array();
    for (const auto& d : p.source_docs) obj["source"].push_back(d.text);
    obj["target"] = p.target_docs.front().text;
    obj["label"] = p.label == Label::Unknown ? json(nullptr)
                                             : json(label_token(p.label));
    out << obj.dump() << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<ProblemPair> load_pan_directory(
    const fs::path& dir, const std::optional<fs::path>& truth) {
  if (!fs::is_directory(dir)) {
    throw StructureError(dir.string() + " is not a directory");
  }
  std::vector<fs::path> problem_dirs;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory()) problem_dirs.push_back(entry.path());
  }
  std::sort(problem_dirs.begin(), problem_dirs.end());

  std::vector<ProblemPair> pairs;
  std::map<std::string, std::size_t> by_id;
  for (const auto& pdir : problem_dirs) {
    ProblemPair pair;
    pair.id = pdir.filename().string();
    std::vector<fs::path> known;
    for (const auto& entry : fs::directory_iterator(pdir)) {
      const auto name = entry.path().filename().string();
      if (entry.is_regular_file() && name.starts_with("known") &&
          name.ends_with(".txt")) {
        known.push_back(entry.path());
      }
    }
    std::sort(known.begin(), known.end());
    const auto unknown = pdir / "unknown.txt";
    if (!fs::exists(unknown)) {
      throw StructureError("problem " + pair.id + " has no unknown.txt");
    }
    if (known.empty()) {
      throw StructureError("problem " + pair.id + " has no known*.txt");
    }
    for (const auto& k : known) {
      pair.source_docs.push_back(
          make_document(pair.id + "/" + k.stem().string(), read_file(k)));
    }
    pair.target_docs.push_back(
        make_document(pair.id + "/unknown", read_file(unknown)));
    by_id[pair.id] = pairs.size();
    pairs.push_back(std::move(pair));
  }

  fs::path truth_path = truth.value_or(dir / "truth.txt");
  if (!truth && !fs::exists(truth_path)) return pairs;
  std::istringstream lines(read_file(truth_path));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string id, token;
    if (!(fields >> id)) continue;
    if (!(fields >> token)) {
      throw ParseError(truth_path.string() + ": missing label", line_no);
    }
    auto it = by_id.find(id);
    if (it == by_id.end()) {
      diag::warn("truth entry for unknown problem " + id + " skipped");
      continue;
    }
    if (token == "Y") {
      pairs[it->second].label = Label::Same;
    } else if (token == "N") {
      pairs[it->second].label = Label::Different;
    } else {
      throw SchemaError(truth_path.string() + ": unknown label '" + token +
                        "' (line " + std::to_string(line_no) + ")");
    }
  }
  return pairs;
}

std::vector<ProblemPair> build_pair_schema(
    const std::map<std::string, std::vector<Document>>& docs_by_author,
    const PairSchemaSpec& spec) {
  struct Ref {
    std::size_t author;
    const Document* doc;
  };
  std::vector<Ref> docs;
  std::size_t author_idx = 0;
  for (const auto& [author, list] : docs_by_author) {
    if (list.size() < spec.min_docs_per_author) continue;
    for (const auto& d : list) docs.push_back({author_idx, &d});
    ++author_idx;
  }

  std::vector<std::pair<std::size_t, std::size_t>> positives, negatives;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    for (std::size_t j = i + 1; j < docs.size(); ++j) {
      (docs[i].author == docs[j].author ? positives : negatives)
          .emplace_back(i, j);
    }
  }

  const std::size_t n_pos = spec.n_positive.value_or(positives.size());
  const std::size_t n_neg = spec.n_negative.value_or(n_pos);
  if (n_pos > positives.size()) {
    throw CapacityError("requested " + std::to_string(n_pos) +
                        " positive pairs but only " +
                        std::to_string(positives.size()) + " exist");
  }
  if (n_neg > negatives.size()) {
    throw CapacityError("requested " + std::to_string(n_neg) +
                        " negative pairs but only " +
                        std::to_string(negatives.size()) + " exist");
  }

  Rng rng(spec.rng_seed);
  std::vector<ProblemPair> out;
  out.reserve(n_pos + n_neg);
  auto emit = [&](const std::vector<std::pair<std::size_t, std::size_t>>& cands,
                  std::size_t count, Label label) {
    for (std::size_t k : sample_indices(cands.size(), count, rng)) {
      const auto& [i, j] = cands[k];
      ProblemPair p;
      p.id = docs[i].doc->id + "|" + docs[j].doc->id;
      p.source_docs = {*docs[i].doc};
      p.target_docs = {*docs[j].doc};
      p.label = label;
      out.push_back(std::move(p));
    }
  };
  emit(positives, n_pos, Label::Same);
  emit(negatives, n_neg, Label::Different);
  return out;
}

std::vector<ProblemPair> augment_by_halving(
    const std::vector<ProblemPair>& pairs) {
  std::vector<ProblemPair> out;
  for (const auto& p : pairs) {
    auto splittable = [](const std::vector<Document>& side) {
      return std::all_of(side.begin(), side.end(), [](const Document& d) {
        return d.sentence_count() >= 2;
      });
    };
    if (!splittable(p.source_docs) || !splittable(p.target_docs)) {
      diag::warn("pair " + p.id +
                 " has a document with fewer than 2 sentences; kept unsplit");
      out.push_back(p);
      continue;
    }
    auto halves = [](const std::vector<Document>& side, int which) {
      std::vector<Document> result;
      for (const auto& d : side) {
        const std::size_t n = d.sentence_count();
        const std::size_t mid = (n + 1) / 2;
        result.push_back(which == 0 ? slice(d, 0, mid, d.id + "#h1")
                                    : slice(d, mid, n, d.id + "#h2"));
      }
      return result;
    };
    for (int s = 0; s < 2; ++s) {
      for (int t = 0; t < 2; ++t) {
        ProblemPair q;
        q.id = p.id + "/h" + std::to_string(s + 1) + std::to_string(t + 1);
        q.source_docs = halves(p.source_docs, s);
        q.target_docs = halves(p.target_docs, t);
        q.label = p.label;
        out.push_back(std::move(q));
      }
    }
  }
  return out;
}

}  // namespace avtk
