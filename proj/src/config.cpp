#include "avtk/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "avtk/error.hpp"
#include "avtk/parallel.hpp"
#include "avtk/rng.hpp"

namespace avtk {
namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string Method::tag() const {
  switch (kind) {
    case MethodKind::TransformationEncoder:
      return "te+" + std::string(classifier_name(classifier));
    case MethodKind::Baseline:
      return "baseline:" + std::string(classifier_name(classifier));
    case MethodKind::Prnn:
      return "prnn";
  }
  return "?";
}

Method Method::parse(std::string_view text) {
  Method m;
  if (text == "prnn") {
    m.kind = MethodKind::Prnn;
  } else if (text.starts_with("te+")) {
    m.kind = MethodKind::TransformationEncoder;
    m.classifier = parse_classifier_kind(text.substr(3));
  } else if (text.starts_with("baseline:")) {
    m.kind = MethodKind::Baseline;
    m.classifier = parse_classifier_kind(text.substr(9));
  } else {
    throw ConfigError("unknown method '" + std::string(text) + "'");
  }
  return m;
}

std::string EvalMode::tag() const {
  return holdout() ? "holdout" : "cv:" + std::to_string(folds);
}

EvalMode EvalMode::parse(std::string_view text) {
  if (text == "holdout") return {};
  if (text.starts_with("cv:")) {
    const std::string k(text.substr(3));
    const auto folds = to_uint("eval", k);
    if (folds < 2) throw ConfigError("eval: cv needs at least 2 folds");
    return {static_cast<std::size_t>(folds)};
  }
  throw ConfigError("eval: expected 'holdout' or 'cv:<k>', got '" +
                    std::string(text) + "'");
}

const std::vector<std::pair<std::string, std::string>>& RunConfig::keys() {
  static const std::vector<std::pair<std::string, std::string>> kKeys = {
      {"data", "dataset for cv runs: JSONL file, PAN directory or synthetic:<spec>"},
      {"train", "holdout training set"},
      {"test", "holdout test set"},
      {"truth", "truth file for PAN directories"},
      {"method", "te+<clf>, baseline:<clf> or prnn; clf in gnb,dt,knn,lr,svm,mlp"},
      {"features", "comma-separated feature configs, e.g. word1:tf,char4:bool"},
      {"window", "expansion window in sentences"},
      {"augment", "split documents in halves to enlarge the training set"},
      {"te_epochs", "TE training epochs"},
      {"te_lr", "TE learning rate"},
      {"prnn_epochs", "PRNN training epochs"},
      {"prnn_lr", "PRNN learning rate"},
      {"dropout", "PRNN dropout rate"},
      {"prnn_clip", "PRNN gradient-norm clip per step (0 = off)"},
      {"embed_dim", "PRNN embedding size"},
      {"hidden_dim", "PRNN hidden size"},
      {"max_len", "PRNN maximum tokens per side"},
      {"embeddings", "pretrained embedding file (token v1 ... vn per line)"},
      {"knn_k", "neighbours for KNN"},
      {"lr_lambda", "L2 strength for logistic regression"},
      {"svm_lambda", "L2 strength for the linear SVM"},
      {"svm_epochs", "SVM epochs"},
      {"mlp_hidden", "MLP hidden units"},
      {"mlp_epochs", "MLP epochs"},
      {"mlp_lr", "MLP learning rate"},
      {"gamma", "RBF and sigmoid kernel scale ('auto' = 1/n)"},
      {"chi2_gamma", "chi-squared kernel scale"},
      {"c0", "sigmoid kernel offset"},
      {"eval", "holdout or cv:<k>"},
      {"seed", "master seed"},
      {"out", "output directory"},
      {"threads", "worker threads (0 = AVTK_THREADS or all processors)"},
  };
  return kKeys;
}

void RunConfig::set(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (key == "data") {
    data = v;
  } else if (key == "train") {
    train = v;
  } else if (key == "test") {
    test = v;
  } else if (key == "truth") {
    truth = v;
  } else if (key == "method") {
    method = Method::parse(v);
    if (method.kind != MethodKind::Prnn) classifier.kind = method.classifier;
  } else if (key == "features") {
    std::vector<FeatureConfig> parsed;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item == "all") {
        for (auto c : all_configs(ValueKind::TermFrequency)) parsed.push_back(c);
      } else if (item == "all:bool") {
        for (auto c : all_configs(ValueKind::Boolean)) parsed.push_back(c);
      } else if (!item.empty()) {
        parsed.push_back(parse_config_name(item));
      }
    }
    if (parsed.empty()) throw ConfigError("features: empty list");
    features = std::move(parsed);
  } else if (key == "window") {
    window = to_uint(key, v);
    if (window == 0) throw ConfigError("window must be >= 1");
  } else if (key == "augment") {
    augment = to_bool(key, v);
  } else if (key == "te_epochs") {
    te.epochs = to_uint(key, v);
  } else if (key == "te_lr") {
    te.learning_rate = to_double(key, v);
  } else if (key == "prnn_epochs") {
    prnn.epochs = to_uint(key, v);
  } else if (key == "prnn_lr") {
    prnn.learning_rate = to_double(key, v);
  } else if (key == "dropout") {
    prnn.dropout_rate = to_double(key, v);
  } else if (key == "prnn_clip") {
    prnn.clip_norm = to_double(key, v);
  } else if (key == "embed_dim") {
    prnn.shape.embed_dim = to_uint(key, v);
  } else if (key == "hidden_dim") {
    prnn.shape.hidden_dim = to_uint(key, v);
  } else if (key == "max_len") {
    prnn.max_sequence_length = to_uint(key, v);
  } else if (key == "embeddings") {
    if (v.empty()) {
      prnn.pretrained_embeddings.reset();
    } else {
      prnn.pretrained_embeddings = v;
    }
  } else if (key == "knn_k") {
    classifier.k = to_uint(key, v);
  } else if (key == "lr_lambda") {
    classifier.l2_lambda = to_double(key, v);
  } else if (key == "svm_lambda") {
    classifier.svm_lambda = to_double(key, v);
  } else if (key == "svm_epochs") {
    classifier.svm_epochs = to_uint(key, v);
  } else if (key == "mlp_hidden") {
    classifier.mlp_hidden = to_uint(key, v);
  } else if (key == "mlp_epochs") {
    classifier.mlp_epochs = to_uint(key, v);
  } else if (key == "mlp_lr") {
    classifier.mlp_learning_rate = to_double(key, v);
  } else if (key == "gamma") {
    if (v == "auto") {
      similarity.gamma.reset();
    } else {
      similarity.gamma = to_double(key, v);
    }
  } else if (key == "chi2_gamma") {
    similarity.chi2_gamma = to_double(key, v);
  } else if (key == "c0") {
    similarity.c0 = to_double(key, v);
  } else if (key == "eval") {
    eval = EvalMode::parse(v);
  } else if (key == "seed") {
    seed = to_uint(key, v);
  } else if (key == "out") {
    out = v;
  } else if (key == "threads") {
    threads = to_uint(key, v);
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

std::string RunConfig::get(const std::string& key) const {
  if (key == "data") return data;
  if (key == "train") return train;
  if (key == "test") return test;
  if (key == "truth") return truth;
  if (key == "method") return method.tag();
  if (key == "features") {
    std::string s;
    for (std::size_t i = 0; i < features.size(); ++i) {
      if (i) s += ',';
      s += config_name(features[i]);
    }
    return s;
  }
  if (key == "window") return std::to_string(window);
  if (key == "augment") return augment ? "true" : "false";
  if (key == "te_epochs") return std::to_string(te.epochs);
  if (key == "te_lr") return fmt_double(te.learning_rate);
  if (key == "prnn_epochs") return std::to_string(prnn.epochs);
  if (key == "prnn_lr") return fmt_double(prnn.learning_rate);
  if (key == "dropout") return fmt_double(prnn.dropout_rate);
  if (key == "prnn_clip") return fmt_double(prnn.clip_norm);
  if (key == "embed_dim") return std::to_string(prnn.shape.embed_dim);
  if (key == "hidden_dim") return std::to_string(prnn.shape.hidden_dim);
  if (key == "max_len") return std::to_string(prnn.max_sequence_length);
  if (key == "embeddings") {
    return prnn.pretrained_embeddings ? prnn.pretrained_embeddings->string() : "";
  }
  if (key == "knn_k") return std::to_string(classifier.k);
  if (key == "lr_lambda") return fmt_double(classifier.l2_lambda);
  if (key == "svm_lambda") return fmt_double(classifier.svm_lambda);
  if (key == "svm_epochs") return std::to_string(classifier.svm_epochs);
  if (key == "mlp_hidden") return std::to_string(classifier.mlp_hidden);
  if (key == "mlp_epochs") return std::to_string(classifier.mlp_epochs);
  if (key == "mlp_lr") return fmt_double(classifier.mlp_learning_rate);
  if (key == "gamma") return similarity.gamma ? fmt_double(*similarity.gamma) : "auto";
  if (key == "chi2_gamma") return fmt_double(similarity.chi2_gamma);
  if (key == "c0") return fmt_double(similarity.c0);
  if (key == "eval") return eval.tag();
  if (key == "seed") return std::to_string(seed);
  if (key == "out") return out.string();
  if (key == "threads") return std::to_string(threads);
  throw ConfigError("unknown config key '" + key + "'");
}

std::string RunConfig::canonical() const {
  std::string text;
  for (const auto& [key, _] : keys()) text += key + " = " + get(key) + "\n";
  return text;
}

std::string RunConfig::hash() const {
  std::string text;
  for (const auto& [key, _] : keys()) {
    if (key == "out" || key == "threads") continue;
    text += key + " = " + get(key) + "\n";
  }
  return fnv1a_hex(text);
}

std::size_t RunConfig::resolved_threads() const {
  return threads ? threads : default_threads();
}

std::uint64_t RunConfig::te_seed() const { return mix_seed(seed, 11); }
std::uint64_t RunConfig::prnn_seed() const { return mix_seed(seed, 12); }
std::uint64_t RunConfig::classifier_seed() const { return mix_seed(seed, 13); }
std::uint64_t RunConfig::fold_seed() const { return mix_seed(seed, 14); }

RunConfig parse_config_text(const std::string& text, RunConfig base) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError("config: expected key = value", line_no);
    }
    try {
      base.set(trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(std::string(e.what()) + " (line " + std::to_string(line_no) + ")");
    }
  }
  return base;
}

RunConfig load_config_file(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), std::move(base));
}

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace avtk
