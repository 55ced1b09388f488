#include <doctest.h>

#include <cmath>

#include "avtk/diag.hpp"
#include "avtk/error.hpp"
#include "avtk/rng.hpp"
#include "avtk/synthetic.hpp"
#include "avtk/te.hpp"
#include "oracles.hpp"

using namespace avtk;

namespace {

Eigen::VectorXd random_unit(std::size_t d, Rng& rng) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(d));
  for (auto& x : v) x = rng.uniform01();
  return v;
}

std::vector<double> as_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

TEST_CASE("hidden size is half the input, rounded up") {
  CHECK(te_hidden_size(4) == 2);
  CHECK(te_hidden_size(5) == 3);
  CHECK(te_hidden_size(1) == 1);
  CHECK(te_init(4, 1).hidden_dim() == 2);
}

TEST_CASE("te_forward") {
  const TEModel zero = te_zero_model(4);
  Rng rng(2);
  const auto act = te_forward(zero, random_unit(4, rng));
  CHECK(act.hidden.size() == 2);
  CHECK(act.output.size() == 4);
  for (double h : act.hidden) CHECK(h == 0.5);
  for (double z : act.output) CHECK(z == 0.5);

  // Decoder is the transposed encoder: z = sigma(W sigma(W^T x + b) + b').
  const TEModel m = te_init(6, 3);
  const Eigen::VectorXd x = random_unit(6, rng);
  const auto a = te_forward(m, x);
  for (Eigen::Index i = 0; i < 6; ++i) {
    double pre = m.bias_out[i];
    for (Eigen::Index j = 0; j < m.weights.cols(); ++j) {
      double hj = m.bias[j];
      for (Eigen::Index k = 0; k < 6; ++k) hj += m.weights(k, j) * x[k];
      pre += m.weights(i, j) / (1.0 + std::exp(-hj));
    }
    CHECK(a.output[i] == doctest::Approx(1.0 / (1.0 + std::exp(-pre))).epsilon(1e-14));
    CHECK(a.output[i] > 0.0);
    CHECK(a.output[i] < 1.0);
  }
  CHECK_THROWS_AS(te_forward(m, random_unit(5, rng)), InvalidArgument);
}

TEST_CASE("te_loss") {
  CHECK(te_loss(Eigen::VectorXd::Constant(1, 0.5), Eigen::VectorXd::Constant(1, 0.5)) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-15));
  Eigen::VectorXd t(2), z(2);
  t << 1, 0;
  z << 0.9, 0.1;
  CHECK(te_loss(t, z) == doctest::Approx(-2.0 * std::log(0.9)).epsilon(1e-15));
  CHECK(te_loss(t, z) == doctest::Approx(0.2107).epsilon(1e-4));

  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::VectorXd tt = random_unit(6, rng);
    Eigen::VectorXd zz = random_unit(6, rng).cwiseMax(1e-3).cwiseMin(1 - 1e-3);
    CHECK(te_loss(tt, zz) == doctest::Approx(oracle::cross_entropy(as_std(tt), as_std(zz))).epsilon(1e-12));
    // The target itself minimizes the loss.
    const Eigen::VectorXd at_target = tt.cwiseMax(1e-3).cwiseMin(1 - 1e-3);
    CHECK(te_loss(tt, at_target) <= te_loss(tt, zz) + 1e-12);
  }

  diag::CaptureWarnings warnings;
  Eigen::VectorXd sat(2);
  sat << 1.0, 0.0;
  const double clamped = te_loss(t, sat);
  CHECK(std::isfinite(clamped));
  CHECK(warnings.count() == 1);
  Eigen::VectorXd wrong(2);
  wrong << 0.0, 1.0;
  CHECK(te_loss(t, wrong) ==
        doctest::Approx(-std::log(1e-12) - std::log(1.0 - (1.0 - 1e-12))).epsilon(1e-14));
}

TEST_CASE("te_gradient matches central differences") {
  Rng rng(21);
  for (int instance = 0; instance < 20; ++instance) {
    CAPTURE(instance);
    const std::size_t d = 1 + rng.index(10);
    TEModel m = te_init(d, 100 + instance);
    for (auto& b : m.bias) b = rng.uniform(-0.5, 0.5);
    for (auto& b : m.bias_out) b = rng.uniform(-0.5, 0.5);
    const Eigen::VectorXd x = random_unit(d, rng), t = random_unit(d, rng);
    const TEGradient g = te_gradient(m, x, t);
    auto loss = [&] { return te_loss(t, te_forward(m, x).output); };
    CHECK(g.loss == doctest::Approx(loss()).epsilon(1e-15));
    CHECK(oracle::check_tensor(m.weights, g.weights, loss) < 1e-4);
    CHECK(oracle::check_tensor(m.bias, g.bias, loss) < 1e-4);
    CHECK(oracle::check_tensor(m.bias_out, g.bias_out, loss) < 1e-4);
  }
}

TEST_CASE("te_train") {
  Rng rng(4);
  std::vector<Eigen::VectorXd> sources;
  for (int i = 0; i < 5; ++i) sources.push_back(random_unit(8, rng));
  const Eigen::VectorXd half = Eigen::VectorXd::Constant(8, 0.5);
  TETrainSpec spec;
  spec.rng_seed = 9;
  const auto r = te_train(sources, half, spec);
  REQUIRE(r.loss_trace.size() == 50);
  CHECK(r.loss_trace.back() <= r.loss_trace.front());

  const auto again = te_train(sources, half, spec);
  CHECK(again.model == r.model);
  CHECK(again.loss_trace == r.loss_trace);

  TETrainSpec none = spec;
  none.epochs = 0;
  const auto untouched = te_train(sources, half, none);
  CHECK(untouched.loss_trace.empty());
  CHECK(untouched.model == te_init(8, 9));

  // The trace records losses measured before each update.
  TETrainSpec one = spec;
  one.epochs = 1;
  const TEModel init = te_init(8, 9);
  const double first = te_loss(half, te_forward(init, sources[0]).output);
  TEModel step = init;
  const auto g = te_gradient(step, sources[0], half);
  step.weights -= 0.1 * g.weights;
  step.bias -= 0.1 * g.bias;
  step.bias_out -= 0.1 * g.bias_out;
  const double second = te_loss(half, te_forward(step, sources[1]).output);
  const auto two = te_train(std::span(sources).first(2), half, one);
  CHECK(two.loss_trace[0] == doctest::Approx((first + second) / 2.0).epsilon(1e-14));

  CHECK_THROWS_AS(te_train(sources, Eigen::VectorXd::Constant(7, 0.5), spec), InvalidArgument);
}

TEST_CASE("te_error_vector") {
  OverlapProblemSpec spec;
  spec.label = Label::Same;
  spec.seed = 3;
  const ProblemPair pair = generate_overlap_problem(spec, "p");
  const auto configs = all_configs(ValueKind::TermFrequency);
  TETrainSpec ts;
  ts.epochs = 5;
  ts.rng_seed = 1;
  const auto v = te_error_vector(pair, configs, 10, ts);
  CHECK(v.size() == 7);
  CHECK(v.complete());
  const auto again = te_error_vector(pair, configs, 10, ts);
  for (std::size_t k = 0; k < 7; ++k) CHECK(*again.errors[k] == *v.errors[k]);

  // The error of a fixed target never drops below that target's binary
  // entropy, whatever the source.
  ProblemPair self = pair;
  self.target_docs = self.source_docs;
  const std::vector<FeatureConfig> w1{{FeatureSet::WordUnigram, ValueKind::TermFrequency}};
  TETrainSpec full;
  full.rng_seed = 2;
  const double e_self = *te_error_vector(self, w1, 10, full).errors[0];
  const auto data = te_problem_data(self, w1[0], 10);
  double entropy = 0.0;
  for (double t : data.target) {
    if (t > 0.0 && t < 1.0) entropy -= t * std::log(t) + (1.0 - t) * std::log(1.0 - t);
  }
  CHECK(e_self >= entropy - 1e-9);

  // A target with no source words is nearly empty over the source
  // vocabulary and is the cheapest to reach.
  OverlapProblemSpec disjoint = spec;
  disjoint.shared_fraction = 0.0;
  const double e_disjoint =
      *te_error_vector(generate_overlap_problem(disjoint, "r"), w1, 10, full).errors[0];
  CHECK(e_disjoint < e_self);
}
