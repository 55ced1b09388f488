#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "avtk/commands.hpp"
#include "avtk/config.hpp"
#include "avtk/error.hpp"
#include "avtk/model_file.hpp"
#include "avtk/pipeline.hpp"
#include "avtk/report.hpp"

using namespace avtk;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("avtk_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// Small, fast settings shared by the tests below.
RunConfig quick(const std::string& method) {
  RunConfig c;
  c.set("method", method);
  c.set("features", "word1:tf,pos1:tf");
  c.set("te_epochs", "5");
  c.set("prnn_epochs", "2");
  c.set("embed_dim", "4");
  c.set("hidden_dim", "5");
  c.set("mlp_epochs", "20");
  c.set("threads", "2");
  c.set("seed", "3");
  return c;
}

const char* kSmall = "synthetic:docs=8,pairs=6,sentences=12,words=5";
const char* kProbe = "synthetic:docs=8,pairs=4,sentences=12,words=5,seed=9";

int run_cli(const std::string& args) {
  const std::string cmd = std::string(AVTK_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return status == 0 ? 0 : 1;
}

}  // namespace

TEST_CASE("config text, keys and hash") {
  const RunConfig c = parse_config_text(
      "# comment\nmethod = baseline:knn\nwindow = 4\nfeatures = all:bool\n"
      "gamma = 0.5\neval = cv:10\nseed = 12\n");
  CHECK(c.method.kind == MethodKind::Baseline);
  CHECK(c.classifier.kind == ClassifierKind::KNN);
  CHECK(c.window == 4);
  CHECK(c.features.size() == 7);
  CHECK(c.features[0].value == ValueKind::Boolean);
  CHECK(c.eval.folds == 10);
  CHECK(*c.similarity.gamma == 0.5);
  CHECK(c.get("method") == "baseline:knn");

  RunConfig d = c;
  d.set("out", "elsewhere");
  d.set("threads", "7");
  CHECK(d.hash() == c.hash());
  d.set("seed", "13");
  CHECK(d.hash() != c.hash());
  CHECK(c.hash().size() == 16);
  CHECK(parse_config_text(c.canonical()).canonical() == c.canonical());

  CHECK_THROWS_AS(parse_config_text("nonsense = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("window = many\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("method = te+forest\n"), ConfigError);
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("model files round-trip every method bit-exactly") {
  const auto train = load_dataset(kSmall);
  const auto probe = load_dataset(kProbe);
  const fs::path dir = scratch("roundtrip");
  for (const std::string method : {"te+gnb", "te+dt", "baseline:knn", "baseline:lr",
                                   "baseline:svm", "baseline:mlp", "prnn"}) {
    CAPTURE(method);
    const RunConfig c = quick(method);
    const TrainedModel m = fit_method(c, train);
    const fs::path path = dir / "m.avtk";
    save_model(m, path);
    const TrainedModel back = load_model(path);
    CHECK(back.method.tag() == method);
    CHECK(back.config_hash == c.hash());
    const auto a = predict_method(m, probe, 1);
    const auto b = predict_method(back, probe, 1);
    CHECK(a.labels == b.labels);
    CHECK(a.scores == b.scores);
    CHECK(serialize_model(back) == serialize_model(m));
    CHECK(describe_model(back).find(method) != std::string::npos);
  }
  fs::remove_all(dir);
}

TEST_CASE("encoder files expose d and d'") {
  const auto train = load_dataset(kSmall);
  const TrainedModel m = fit_encoder(quick("te+gnb"), train[0]);
  const auto& eb = std::get<EncoderBundle>(m.body);
  const std::size_t d = eb.vocabulary.dimension();
  const std::string text = describe_model(deserialize_model(serialize_model(m)));
  CHECK(text.find("d            " + std::to_string(d) + "\n") != std::string::npos);
  CHECK(text.find("d'           " + std::to_string((d + 1) / 2) + "\n") != std::string::npos);
  const auto errors = encoder_errors(std::get<EncoderBundle>(deserialize_model(serialize_model(m)).body),
                                     train);
  CHECK(errors == encoder_errors(eb, train));
}

TEST_CASE("corrupt model files raise format errors") {
  const auto train = load_dataset(kSmall);
  const std::string text = serialize_model(fit_method(quick("te+gnb"), train));
  CHECK_THROWS_AS(deserialize_model(text.substr(0, text.size() / 2)), FormatError);
  CHECK_THROWS_AS(deserialize_model("XVTK 1\n" + text.substr(text.find('\n') + 1)),
                  FormatError);
  CHECK_THROWS_AS(deserialize_model("AVTK 99\n" + text.substr(text.find('\n') + 1)),
                  FormatError);
  CHECK_THROWS_AS(deserialize_model(""), FormatError);
}

TEST_CASE("cmd_run writes reports and is deterministic") {
  const fs::path dir = scratch("run");
  RunConfig c = quick("te+gnb");
  c.set("data", kSmall);
  c.set("eval", "cv:3");
  c.set("out", (dir / "a").string());
  std::ostringstream log;
  cmd_run(c, log);
  c.set("out", (dir / "b").string());
  c.set("threads", "1");
  cmd_run(c, log);
  for (const char* f : {"report.json", "report.csv", "te_errors.csv"}) {
    CHECK(fs::exists(dir / "a" / f));
    CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
  }
  const std::string csv = slurp(dir / "a" / "report.csv");
  CHECK(csv.rfind("fold,size,accuracy,auc,score,tp,fp,tn,fn\n", 0) == 0);
  CHECK(csv.find("\nall,12,") != std::string::npos);
  const std::string errors = slurp(dir / "a" / "te_errors.csv");
  CHECK(errors.rfind("id,label,word1:tf,pos1:tf\n", 0) == 0);

  RunConfig b = quick("baseline:gnb");
  b.set("train", kSmall);
  b.set("test", kProbe);
  b.set("out", (dir / "h").string());
  cmd_run(b, log);
  CHECK(fs::exists(dir / "h" / "summary_vectors.csv"));
  CHECK(fs::exists(dir / "h" / "model.avtk"));
  fs::remove_all(dir);
}

TEST_CASE("prepare and model commands") {
  const fs::path dir = scratch("cmds");
  PrepareOptions p;
  p.source = "synthetic:docs=50,pairs=50";
  p.out = dir / "pairs.jsonl";
  CHECK(cmd_prepare(p) == 100);
  const std::string first = slurp(p.out);
  cmd_prepare(p);
  CHECK(slurp(p.out) == first);
  p.halve = true;
  p.out = dir / "halved.jsonl";
  CHECK(cmd_prepare(p) == 400);

  RunConfig c = quick("te+dt");
  c.set("data", kSmall);
  cmd_model_save(c, dir / "m.avtk");
  std::ostringstream a, b;
  cmd_model_load(dir / "m.avtk", kProbe, a, 1);
  cmd_model_load(dir / "m.avtk", kProbe, b, 2);
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("id,label,score\n", 0) == 0);
  std::ostringstream info;
  cmd_model_inspect(dir / "m.avtk", info);
  CHECK(info.str().find(c.hash()) != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("command-line exit codes") {
  const fs::path dir = scratch("exit");
  const std::string out = (dir / "pairs.jsonl").string();
  CHECK(run_cli("prepare --source synthetic:docs=6,pairs=4 --out " + out) == 0);
  CHECK(run_cli("run --data " + out + " --method te+gnb --features word1 --te_epochs 2 "
                "--eval cv:2 --out " + (dir / "r").string()) == 0);
  CHECK(fs::exists(dir / "r" / "report.json"));
  CHECK(run_cli("run --data " + out + " --method nonsense") != 0);
  CHECK(run_cli("run --data " + (dir / "missing.jsonl").string()) != 0);

  const std::string model = (dir / "m.avtk").string();
  CHECK(run_cli("model save " + model + " --data " + out +
                " --method te+gnb --features word1 --te_epochs 2") == 0);
  CHECK(run_cli("model inspect " + model) == 0);
  const std::string text = slurp(model);
  {
    std::ofstream cut(model, std::ios::binary);
    cut << text.substr(0, text.size() - 10);
  }
  CHECK(run_cli("model inspect " + model) != 0);
  fs::remove_all(dir);
}
