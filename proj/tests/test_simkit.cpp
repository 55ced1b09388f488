#include <doctest.h>

#include <cmath>

#include "avtk/corpus.hpp"
#include "avtk/diag.hpp"
#include "avtk/error.hpp"
#include "avtk/rng.hpp"
#include "avtk/simkit.hpp"
#include "oracles.hpp"

using namespace avtk;

namespace {

double oracle_metric(Metric m, const std::vector<double>& x, const std::vector<double>& y,
                     const SimilarityParams& p) {
  const double g = p.gamma ? *p.gamma : 1.0 / static_cast<double>(x.size());
  switch (m) {
    case Metric::Chi2: return oracle::chi2(x, y, p.chi2_gamma);
    case Metric::Cosine: return oracle::cosine(x, y);
    case Metric::Euclidean: return oracle::euclidean(x, y);
    case Metric::Linear: return oracle::dot(x, y);
    case Metric::Rbf: return oracle::rbf(x, y, g);
    case Metric::MeanL1: return oracle::mean_l1(x, y);
    case Metric::Sigmoid: return oracle::sigmoid_kernel(x, y, g, p.c0);
  }
  return NAN;
}

ProblemPair pair_of(const std::string& s, const std::string& t) {
  ProblemPair p;
  p.id = "p";
  p.source_docs.push_back(make_document("s", s));
  p.target_docs.push_back(make_document("t", t));
  return p;
}

}  // namespace

TEST_CASE("similarity hand examples") {
  const std::vector<double> e1{1, 0}, e2{0, 1}, x{0.3, 2.0, 1.5};
  CHECK(similarity(Metric::Cosine, e1, e2) == 0.0);
  CHECK(similarity(Metric::Cosine, x, x) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(similarity(Metric::Euclidean, std::vector<double>{3, 4}, std::vector<double>{0, 0}) == 5.0);
  CHECK(similarity(Metric::MeanL1, std::vector<double>{1, 3}, std::vector<double>{2, 5}) == 1.5);
  SimilarityParams p;
  p.gamma = 0.7;
  CHECK(similarity(Metric::Rbf, x, x, p) == 1.0);
  CHECK(similarity(Metric::Chi2, x, x, p) == 1.0);
  const std::vector<double> zero{0, 0};
  CHECK(similarity(Metric::Cosine, zero, e1) == 0.0);
  CHECK_THROWS_AS(similarity(Metric::Linear, e1, x), InvalidArgument);
}

TEST_CASE("metrics match direct summation on random inputs") {
  Rng rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng.index(10);
    std::vector<double> x(n), y(n);
    const bool integer = trial % 2 == 0;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = integer ? static_cast<double>(rng.index(6)) : rng.uniform(-1.0, 2.0);
      y[i] = integer ? static_cast<double>(rng.index(6)) : rng.uniform(-1.0, 2.0);
    }
    SimilarityParams p;
    if (trial % 3 == 0) p.gamma = rng.uniform(0.01, 1.0);
    p.chi2_gamma = rng.uniform(0.1, 2.0);
    p.c0 = trial % 4 == 0 ? rng.uniform(-1.0, 1.0) : 0.0;
    const auto fused = fusion_vector(x, y, p);
    for (std::size_t m = 0; m < kMetricCount; ++m) {
      const Metric metric = kAllMetrics[m];
      const double want = oracle_metric(metric, x, y, p);
      const double got = similarity(metric, x, y, p);
      CHECK(std::abs(got - want) <= 1e-12 * std::max(1.0, std::abs(want)));
      CHECK(fused[m] == got);
      // Symmetry.
      CHECK(similarity(metric, y, x, p) == doctest::Approx(got).epsilon(1e-14));
    }
    if (!integer) continue;
    CHECK(fused[1] >= 0.0);
    CHECK(fused[1] <= 1.0 + 1e-15);
    CHECK(fused[0] > 0.0);
    CHECK(fused[0] <= 1.0);
    CHECK(fused[4] > 0.0);
    CHECK(fused[4] <= 1.0);
  }
}

TEST_CASE("fusion_vector identity slots") {
  const std::vector<double> v{0.2, -0.4, 0.9, 0.1};
  SimilarityParams p;
  const auto f = fusion_vector(v, v, p);
  const double vv = oracle::dot(v, v);
  CHECK(f.size() == 7);
  CHECK(f[0] == 1.0);
  CHECK(f[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(f[2] == 0.0);
  CHECK(f[3] == doctest::Approx(vv).epsilon(1e-15));
  CHECK(f[4] == 1.0);
  CHECK(f[5] == 0.0);
  CHECK(f[6] == doctest::Approx(std::tanh(vv / 4.0)).epsilon(1e-15));
}

TEST_CASE("fusion_backward matches central differences") {
  Rng rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + rng.index(6);
    Eigen::VectorXd a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = rng.uniform(-1.0, 1.0);
      b[i] = rng.uniform(-1.0, 1.0);
    }
    SimilarityParams p;
    p.c0 = 0.3;
    FusionVector w;
    for (auto& x : w) x = rng.uniform(-1.0, 1.0);
    auto loss = [&] {
      const auto f = fusion_vector(std::span<const double>(a.data(), n),
                                   std::span<const double>(b.data(), n), p);
      double s = 0.0;
      for (std::size_t m = 0; m < kMetricCount; ++m) s += w[m] * f[m];
      return s;
    };
    Eigen::VectorXd ga(n), gb(n);
    fusion_backward(std::span<const double>(a.data(), n), std::span<const double>(b.data(), n),
                    p, w, std::span<double>(ga.data(), n), std::span<double>(gb.data(), n));
    CHECK(oracle::check_tensor(a, ga, loss) < 1e-4);
    CHECK(oracle::check_tensor(b, gb, loss) < 1e-4);
  }
}

TEST_CASE("problem_summary_vector") {
  const auto configs = all_configs(ValueKind::TermFrequency);
  const auto same = pair_of("The cat sat on the mat. It was warm.",
                            "The cat sat on the mat. It was warm.");
  const auto v = problem_summary_vector(same, configs);
  REQUIRE(v.size() == 49);
  for (std::size_t k = 0; k < configs.size(); ++k) {
    CHECK(v[7 * k + 1] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(v[7 * k + 2] == 0.0);
    CHECK(v[7 * k + 5] == 0.0);
  }
  CHECK(problem_summary_vector(same, configs) == v);

  const auto both = all_configs(ValueKind::Boolean);
  std::vector<FeatureConfig> fourteen = configs;
  fourteen.insert(fourteen.end(), both.begin(), both.end());
  CHECK(problem_summary_vector(same, fourteen).size() == 98);

  // A source without any 4-word sentence has an empty word4 vocabulary.
  const auto short_pair = pair_of("Hi there.", "Hello there friend.");
  diag::CaptureWarnings warnings;
  const std::vector<FeatureConfig> w4{{FeatureSet::WordFourgram, ValueKind::TermFrequency}};
  const auto z = problem_summary_vector(short_pair, w4);
  CHECK(warnings.count() >= 1);
  REQUIRE(z.size() == 7);
  CHECK(z[0] == 1.0);  // chi2 of zero vectors
  CHECK(z[1] == 0.0);  // cosine with a zero vector
  CHECK(z[2] == 0.0);
}
