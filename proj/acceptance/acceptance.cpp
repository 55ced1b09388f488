// Acceptance suite: prints one PASS/FAIL/SKIP line per criterion and exits
// nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "../tests/oracles.hpp"
#include "avtk/corpus.hpp"
#include "avtk/diag.hpp"
#include "avtk/eval.hpp"
#include "avtk/model_file.hpp"
#include "avtk/pipeline.hpp"
#include "avtk/prnn.hpp"
#include "avtk/report.hpp"
#include "avtk/rng.hpp"
#include "avtk/simkit.hpp"
#include "avtk/synthetic.hpp"
#include "avtk/te.hpp"

using namespace avtk;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  enum Kind { Pass, Fail, Skip } kind = Fail;
  std::string detail;
};

Outcome pass(std::string d) { return {Outcome::Pass, std::move(d)}; }
Outcome fail(std::string d) { return {Outcome::Fail, std::move(d)}; }

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Eigen::VectorXd random_vec(std::size_t d, Rng& rng, double lo = 0.0, double hi = 1.0) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(d));
  for (auto& x : v) x = rng.uniform(lo, hi);
  return v;
}

std::vector<double> as_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

// 1. Gradients -------------------------------------------------------------

Outcome gradients() {
  double worst = 0.0;
  for (int inst = 0; inst < 20; ++inst) {
    Rng rng(static_cast<std::uint64_t>(100 + inst));
    const std::size_t d = 3 + static_cast<std::size_t>(inst % 5);
    TEModel m = te_init(d, static_cast<std::uint64_t>(inst));
    for (auto& x : m.bias) x = rng.uniform(-0.5, 0.5);
    for (auto& x : m.bias_out) x = rng.uniform(-0.5, 0.5);
    const Eigen::VectorXd x = random_vec(d, rng), t = random_vec(d, rng);
    const TEGradient g = te_gradient(m, x, t);
    auto loss = [&] { return te_loss(t, te_forward(m, x).output); };
    worst = std::max(worst, oracle::check_tensor(m.weights, g.weights, loss));
    worst = std::max(worst, oracle::check_tensor(m.bias, g.bias, loss));
    worst = std::max(worst, oracle::check_tensor(m.bias_out, g.bias_out, loss));
  }
  const double te_worst = worst;

  worst = 0.0;
  for (int inst = 0; inst < 20; ++inst) {
    std::vector<std::string> tokens;
    for (int i = 0; i < 6; ++i) tokens.push_back("t" + std::to_string(i));
    PRNNShape shape;
    shape.embed_dim = 3;
    shape.hidden_dim = 4;
    PRNNModel m = init_prnn(tokens, shape, static_cast<std::uint64_t>(500 + inst));
    Rng rng(static_cast<std::uint64_t>(inst));
    for (auto& x : m.b) x = rng.uniform(-0.3, 0.3);
    for (auto& x : m.c) x = rng.uniform(-0.3, 0.3);
    for (auto& x : m.b_s) x = rng.uniform(-0.3, 0.3);
    for (Eigen::Index i = 0; i < m.embeddings.size(); ++i) {
      m.embeddings.data()[i] = rng.uniform(-1.0, 1.0);
    }
    std::vector<std::uint32_t> s, t;
    for (int i = 0; i < 3 + inst % 3; ++i) s.push_back(static_cast<std::uint32_t>(rng.index(m.vocab_size())));
    for (int i = 0; i < 2 + inst % 4; ++i) t.push_back(static_cast<std::uint32_t>(rng.index(m.vocab_size())));
    const Label label = inst % 2 ? Label::Same : Label::Different;
    const Eigen::VectorXd ms = dropout_mask(4, 0.2, rng), mt = dropout_mask(4, 0.2, rng);
    const PRNNGradient g = prnn_gradient(m, s, t, label, &ms, &mt);
    auto loss = [&] { return prnn_gradient(m, s, t, label, &ms, &mt).loss; };
    for (auto [p, a] : {std::pair{&m.w_hh, &g.w_hh}, {&m.w_hx, &g.w_hx}, {&m.w_ho, &g.w_ho},
                        {&m.w_s, &g.w_s}}) {
      worst = std::max(worst, oracle::check_tensor(*p, *a, loss));
    }
    for (auto [p, a] : {std::pair{&m.b, &g.b}, {&m.c, &g.c}, {&m.b_s, &g.b_s}}) {
      worst = std::max(worst, oracle::check_tensor(*p, *a, loss));
    }
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(m.embeddings.rows(), m.embeddings.cols());
    for (const auto& [col, v] : g.embeddings) dense.col(col) = v;
    worst = std::max(worst, oracle::check_tensor(m.embeddings, dense, loss));
  }
  const std::string d = fmt("20+20 instances, worst rel err TE %.2e, PRNN %.2e", te_worst, worst);
  return te_worst < 1e-4 && worst < 1e-4 ? pass(d) : fail(d);
}

// 2. Formula oracles -------------------------------------------------------

Outcome formulas() {
  Rng rng(2024);
  double worst = 0.0;
  auto track = [&](double a, double b) {
    worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(b)));
  };
  SimilarityParams params;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng.index(10);
    const auto x = as_std(random_vec(n, rng)), y = as_std(random_vec(n, rng));
    const double g = 1.0 / static_cast<double>(n);
    track(similarity(Metric::Chi2, x, y, params), oracle::chi2(x, y, 1.0));
    track(similarity(Metric::Cosine, x, y, params), oracle::cosine(x, y));
    track(similarity(Metric::Euclidean, x, y, params), oracle::euclidean(x, y));
    track(similarity(Metric::Linear, x, y, params), oracle::dot(x, y));
    track(similarity(Metric::Rbf, x, y, params), oracle::rbf(x, y, g));
    track(similarity(Metric::MeanL1, x, y, params), oracle::mean_l1(x, y));
    track(similarity(Metric::Sigmoid, x, y, params), oracle::sigmoid_kernel(x, y, g, 0.0));

    // Er: reconstruction cross-entropy and its mean over windows.
    TEModel m = te_init(n, static_cast<std::uint64_t>(trial));
    const Eigen::VectorXd target = random_vec(n, rng);
    std::vector<Eigen::VectorXd> sources;
    for (std::size_t k = 0; k < 1 + rng.index(4); ++k) sources.push_back(random_vec(n, rng));
    double sum = 0.0;
    for (const auto& s : sources) {
      const auto z = as_std(te_forward(m, s).output);
      const double e = oracle::cross_entropy(as_std(target), z);
      track(te_loss(target, te_forward(m, s).output), e);
      sum += e;
    }
    track(te_mean_error(m, sources, target), sum / static_cast<double>(sources.size()));

    const std::size_t count = 2 + rng.index(49);
    std::vector<int> truth(count), predicted(count);
    std::vector<double> scores(count);
    for (std::size_t i = 0; i < count; ++i) {
      truth[i] = static_cast<int>(rng.index(2));
      predicted[i] = static_cast<int>(rng.index(2));
      scores[i] = static_cast<double>(rng.index(8)) / 8.0;  // ties on purpose
    }
    truth[0] = 0;
    truth[1] = 1;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < count; ++i) hits += truth[i] == predicted[i];
    track(accuracy(predicted, truth), static_cast<double>(hits) / static_cast<double>(count));
    track(roc_auc(scores, truth), oracle::auc_by_pairs(scores, truth));
  }
  const std::string d = fmt("500 trials, worst deviation %.2e", worst);
  return worst <= 1e-12 ? pass(d) : fail(d);
}

// 3. Expansion law ---------------------------------------------------------

Outcome expansion() {
  std::size_t checked = 0;
  for (std::size_t n = 1; n <= 50; ++n) {
    std::vector<std::string> sentences;
    for (std::size_t i = 0; i < n; ++i) sentences.push_back("s" + std::to_string(i) + " .");
    const Document doc = document_from_sentences("d", sentences);
    for (std::size_t l = 1; l <= n; ++l) {
      const auto w = expand_document(doc, l);
      if (w.size() != n - l + 1) return fail(fmt("n=%g l=%g: %g windows", n, l, w.size()));
      for (std::size_t k = 0; k < w.size(); ++k) {
        if (w[k].sentences.size() != l) return fail(fmt("n=%g l=%g: window size", n, l));
        for (std::size_t j = 0; j < l; ++j) {
          if (w[k].sentences[j] != sentences[k + j]) return fail(fmt("n=%g l=%g: content", n, l));
        }
        if (k > 0) {
          for (std::size_t j = 1; j < l; ++j) {
            if (w[k - 1].sentences[j] != w[k].sentences[j - 1]) {
              return fail(fmt("n=%g l=%g: overlap", n, l));
            }
          }
        }
      }
      ++checked;
    }
  }
  return pass(std::to_string(checked) + " (n, l) combinations");
}

// 4. Separation property ---------------------------------------------------

Outcome separation() {
  diag::CaptureWarnings quiet;  // clamp warnings are expected here
  const FeatureConfig config = parse_config_name("word1:tf");
  TETrainSpec spec;  // 50 epochs, lr 0.1
  double err[2] = {0, 0}, first[2] = {0, 0}, last[2] = {0, 0};
  int count[2] = {0, 0};
  for (int p = 0; p < 30; ++p) {
    const int positive = p % 2;
    OverlapProblemSpec o;
    o.shared_fraction = positive ? 0.8 : 0.2;
    o.label = positive ? Label::Same : Label::Different;
    o.seed = static_cast<std::uint64_t>(1000 + p);
    const ProblemPair pair = generate_overlap_problem(o, "overlap" + std::to_string(p));
    const TEProblemData data = te_problem_data(pair, config, 10);
    spec.rng_seed = static_cast<std::uint64_t>(p);
    const auto trained = te_train(data.sources, data.target, spec);
    err[positive] += te_mean_error(trained.model, data.sources, data.target);
    first[positive] += trained.loss_trace.front();
    last[positive] += trained.loss_trace.back();
    ++count[positive];
  }
  for (int c = 0; c < 2; ++c) {
    err[c] /= count[c];
    first[c] /= count[c];
    last[c] /= count[c];
  }
  const std::string d =
      fmt("mean error neg %.4f < pos %.4f", err[0], err[1]) +
      fmt("; loss epoch 1 -> 50: neg %.4f -> %.4f", first[0], last[0]) +
      fmt(", pos %.4f -> %.4f", first[1], last[1]);
  return err[0] < err[1] && last[0] < first[0] && last[1] < first[1] ? pass(d) : fail(d);
}

// 5. End-to-end discrimination ---------------------------------------------

const char* kTrain = "synthetic:pairs=50,seed=7";
const char* kTest = "synthetic:pairs=50,seed=8";

Outcome discrimination(const fs::path& scratch) {
  diag::CaptureWarnings quiet;
  RunConfig te;
  te.set("method", "te+gnb");
  te.set("train", kTrain);
  te.set("test", kTest);
  const EvalReport te_report = run_experiment(te).report;

  // PRNN: 5-fold CV over the pooled 200 pairs.
  std::vector<ProblemPair> pooled;
  for (const auto& [tag, source] : {std::pair{"a/", kTrain}, {"b/", kTest}}) {
    for (auto p : load_dataset(source)) {
      p.id = tag + p.id;
      pooled.push_back(std::move(p));
    }
  }
  const fs::path data = scratch / "pooled.jsonl";
  save_pairs_jsonl(pooled, data);
  RunConfig prnn;
  prnn.set("method", "prnn");
  prnn.set("data", data.string());
  prnn.set("eval", "cv:5");
  // U[0,1) embeddings of width 50 saturate the tanh units and training stalls
  // on this corpus; 16 keeps every other setting at its default.
  prnn.set("embed_dim", "16");
  const EvalReport prnn_report = run_experiment(prnn).report;

  const std::string d = fmt("TE+GNB holdout acc %.3f (100/100); PRNN 5-fold pooled acc %.3f (200)",
                            te_report.accuracy, prnn_report.accuracy);
  return te_report.accuracy >= 0.90 && prnn_report.accuracy >= 0.90 ? pass(d) : fail(d);
}

// 6. Published arithmetic --------------------------------------------------

Outcome arithmetic() {
  const double a = score_metric(0.8, 0.835);
  const double b = score_metric(0.76, 0.81);
  const double shown = std::floor(b * 100.0) / 100.0;
  std::map<std::string, std::vector<Document>> docs;
  for (int author = 0; author < 20; ++author) {
    for (int k = 0; k < 9; ++k) {
      const std::string id = "a" + std::to_string(author) + "d" + std::to_string(k);
      docs["a" + std::to_string(author)].push_back(make_document(id, "text of " + id + " ."));
    }
  }
  const auto pairs = build_pair_schema(docs, {});
  std::size_t positives = 0;
  for (const auto& p : pairs) positives += p.label == Label::Same;
  const bool ok = std::abs(a - 0.668) < 1e-12 && std::abs(b - 0.6156) < 1e-12 &&
                  std::abs(shown - 0.61) < 1e-12 && positives == 720;
  return (ok ? pass : fail)(fmt("0.8 x 0.835 = %.4f; 0.76 x 0.81 = %.4f shown as %.2f", a, b, shown) +
                            "; 20 x C(9,2) positives = " + std::to_string(positives));
}

// 7. Determinism and persistence -------------------------------------------

Outcome determinism(const fs::path& scratch) {
  diag::CaptureWarnings quiet;
  RunConfig c;
  c.set("method", "te+gnb");
  c.set("features", "word1:tf,char4:tf,pos2:tf");
  c.set("te_epochs", "10");
  c.set("data", "synthetic:pairs=15,seed=3");
  c.set("eval", "cv:3");
  c.set("threads", "1");
  c.set("out", (scratch / "r1").string());
  const std::string one = report_json(run_experiment(c).report, c);
  c.set("threads", "4");
  c.set("out", (scratch / "r2").string());
  const std::string two = report_json(run_experiment(c).report, c);
  if (one != two) return fail("report.json differs between two identical runs");

  const auto train = load_dataset("synthetic:pairs=15,seed=3");
  const auto probe = load_dataset("synthetic:pairs=10,seed=4");
  std::size_t models = 0;
  for (const std::string method : {"te+gnb", "baseline:lr", "prnn"}) {
    RunConfig m;
    m.set("method", method);
    m.set("features", "word1:tf,pos1:tf");
    m.set("te_epochs", "10");
    m.set("prnn_epochs", "2");
    const TrainedModel model = fit_method(m, train);
    const fs::path path = scratch / "model.avtk";
    save_model(model, path);
    const TrainedModel back = load_model(path);
    const auto a = predict_method(model, probe, 1);
    const auto b = predict_method(back, probe, 1);
    if (a.labels != b.labels || a.scores != b.scores) {
      return fail(method + ": predictions changed after save/load");
    }
    ++models;
  }
  return pass("byte-identical reports; " + std::to_string(models) +
              " models reload with identical predictions");
}

// 8. PAN 2013 ---------------------------------------------------------------

Outcome pan2013() {
  const char* root = std::getenv("AVTK_PAN2013_DIR");
  if (root == nullptr || !fs::is_directory(root)) {
    return {Outcome::Skip, "set AVTK_PAN2013_DIR to <dir> holding train/ and test/ to run"};
  }
  diag::CaptureWarnings quiet;
  RunConfig c;
  c.set("method", "te+gnb");
  c.set("train", (fs::path(root) / "train").string());
  c.set("test", (fs::path(root) / "test").string());
  const EvalReport r = run_experiment(c).report;
  const std::string d = fmt("accuracy %.3f (target 0.80 +/- 0.10), auc %.3f", r.accuracy, r.auc);
  return std::abs(r.accuracy - 0.80) <= 0.10 + 1e-12 ? pass(d) : fail(d);
}

}  // namespace

int main() {
  const fs::path scratch = fs::temp_directory_path() / "avtk_acceptance";
  fs::remove_all(scratch);
  fs::create_directories(scratch);

  struct Criterion {
    std::string name;
    double budget_seconds;  // 0 = unbounded
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"gradient correctness", 10, gradients},
      {"formula oracles", 5, formulas},
      {"expansion law", 5, expansion},
      {"separation property", 120, separation},
      {"synthetic discrimination", 600, [&] { return discrimination(scratch); }},
      {"published arithmetic", 1, arithmetic},
      {"determinism and persistence", 60, [&] { return determinism(scratch); }},
      {"PAN 2013 reproduction", 0, pan2013},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[i].run();
    } catch (const std::exception& e) {
      out = fail(std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (out.kind == Outcome::Pass && criteria[i].budget_seconds > 0 &&
        secs > criteria[i].budget_seconds) {
      out = fail(out.detail + fmt("; over the %.0fs budget", criteria[i].budget_seconds));
    }
    const char* tag = out.kind == Outcome::Pass ? "PASS" : out.kind == Outcome::Skip ? "SKIP" : "FAIL";
    failures += out.kind == Outcome::Fail;
    std::printf("[%s] %zu %s (%.1fs): %s\n", tag, i + 1, criteria[i].name.c_str(), secs,
                out.detail.c_str());
    std::fflush(stdout);
  }
  fs::remove_all(scratch);
  return failures == 0 ? 0 : 1;
}
