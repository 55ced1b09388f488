#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "avtk/classify.hpp"
#include "avtk/error.hpp"
#include "avtk/rng.hpp"
#include "oracles.hpp"

using namespace avtk;

namespace {

ClassifierSpec spec_of(ClassifierKind kind) {
  ClassifierSpec s;
  s.kind = kind;
  s.seed = 5;
  return s;
}

// Two Gaussian blobs, separable when `gap` is large.
void blobs(Rng& rng, std::size_t n, std::size_t d, double gap, FeatureMatrix& x,
           std::vector<int>& y) {
  x.clear();
  y.clear();
  for (std::size_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(i % 2);
    FeatureRow row(d);
    for (auto& v : row) v = rng.uniform(-1.0, 1.0) + (label ? gap : 0.0);
    x.push_back(row);
    y.push_back(label);
  }
}

}  // namespace

TEST_CASE("fit rejects a single class and predict checks the dimension") {
  const FeatureMatrix x{{0.0}, {1.0}};
  const std::vector<int> same{1, 1};
  for (auto kind : {ClassifierKind::GNB, ClassifierKind::DT, ClassifierKind::KNN,
                    ClassifierKind::LR, ClassifierKind::SVM, ClassifierKind::MLP}) {
    CHECK_THROWS_AS(fit(spec_of(kind), x, same), DegenerateLabels);
    const auto m = fit(spec_of(kind), x, std::vector<int>{0, 1});
    CHECK_THROWS_AS(predict(m, FeatureMatrix{{1.0, 2.0}}), InvalidArgument);
  }
}

TEST_CASE("GNB") {
  const auto m = fit(spec_of(ClassifierKind::GNB), FeatureMatrix{{0.0}, {10.0}},
                     std::vector<int>{0, 1});
  const auto p = predict(m, FeatureMatrix{{1.0}, {9.0}});
  CHECK(p.labels == std::vector<int>{0, 1});
  for (double s : p.scores) {
    CHECK(s >= 0.0);
    CHECK(s <= 1.0);
  }

  // Bayes rule by hand: class 0 = {0, 2}, class 1 = {5, 9}.
  const auto h = fit(spec_of(ClassifierKind::GNB), FeatureMatrix{{0.0}, {2.0}, {5.0}, {9.0}},
                     std::vector<int>{0, 0, 1, 1});
  auto density = [](double x, double mu, double var) {
    return std::exp(-(x - mu) * (x - mu) / (2 * var)) / std::sqrt(2 * M_PI * var);
  };
  for (double x : {-1.0, 1.0, 3.3, 7.0, 12.0}) {
    const double a = 0.5 * density(x, 1.0, 1.0), b = 0.5 * density(x, 7.0, 4.0);
    const double posterior = b / (a + b);
    CHECK(std::abs(predict(h, FeatureMatrix{{x}}).scores[0] - posterior) < 1e-12);
  }
}

TEST_CASE("KNN equals an exhaustive-search oracle") {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 3 + rng.index(18), d = 1 + rng.index(4);
    FeatureMatrix x;
    std::vector<int> y;
    for (std::size_t i = 0; i < n; ++i) {
      FeatureRow r(d);
      for (auto& v : r) v = static_cast<double>(rng.index(5));
      x.push_back(r);
      y.push_back(static_cast<int>(i % 2));
    }
    const auto m = fit(spec_of(ClassifierKind::KNN), x, y);
    FeatureRow q(d);
    for (auto& v : q) v = rng.uniform(-1.0, 5.0);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    auto dist = [&](std::size_t i) {
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) s += (x[i][j] - q[j]) * (x[i][j] - q[j]);
      return s;
    };
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return dist(a) < dist(b); });
    const int votes = y[order[0]] + y[order[1]] + y[order[2]];
    const auto p = predict(m, FeatureMatrix{q});
    CHECK(p.scores[0] == votes / 3.0);
    CHECK(p.labels[0] == (votes >= 2 ? 1 : 0));
  }
  const auto two_thirds = fit(spec_of(ClassifierKind::KNN),
                              FeatureMatrix{{0.0}, {1.0}, {2.0}, {10.0}, {11.0}},
                              std::vector<int>{1, 1, 0, 0, 0});
  CHECK(predict(two_thirds, FeatureMatrix{{0.5}}).scores[0] == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("decision tree fits consistent data exactly") {
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    FeatureMatrix x;
    std::vector<int> y;
    for (int i = 0; i < 30; ++i) {
      x.push_back({static_cast<double>(i), rng.uniform01()});
      y.push_back(static_cast<int>(rng.index(2)));
    }
    if (std::count(y.begin(), y.end(), 1) == 0) y[0] = 1;
    if (std::count(y.begin(), y.end(), 0) == 0) y[0] = 0;
    const auto m = fit(spec_of(ClassifierKind::DT), x, y);
    CHECK(predict(m, x).labels == y);
  }
}

TEST_CASE("logistic regression objective gradient and separable fit") {
  Rng rng(12);
  std::vector<Eigen::VectorXd> rows;
  std::vector<int> y;
  for (int i = 0; i < 15; ++i) {
    Eigen::VectorXd r(3);
    for (auto& v : r) v = rng.uniform(-2.0, 2.0);
    rows.push_back(r);
    y.push_back(static_cast<int>(rng.index(2)));
  }
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd w(3);
    for (auto& v : w) v = rng.uniform(-1.0, 1.0);
    Eigen::VectorXd bias = Eigen::VectorXd::Constant(1, rng.uniform(-1.0, 1.0));
    Eigen::VectorXd gw;
    double gb = 0.0;
    LogisticRegression::objective(w, bias[0], rows, y, 1.0, &gw, &gb);
    auto loss = [&] {
      return LogisticRegression::objective(w, bias[0], rows, y, 1.0, nullptr, nullptr);
    };
    CHECK(oracle::check_tensor(w, gw, loss) < 1e-4);
    CHECK(oracle::check_tensor(bias, Eigen::VectorXd::Constant(1, gb), loss) < 1e-4);
  }

  FeatureMatrix x;
  std::vector<int> labels;
  blobs(rng, 40, 2, 4.0, x, labels);
  const auto m = fit(spec_of(ClassifierKind::LR), x, labels);
  CHECK(predict(m, x).labels == labels);

  // Converged LR does not depend on row order.
  FeatureMatrix xr(x.rbegin(), x.rend());
  std::vector<int> yr(labels.rbegin(), labels.rend());
  const auto mr = fit(spec_of(ClassifierKind::LR), xr, yr);
  const auto a = predict(m, x).scores, b = predict(mr, x).scores;
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-6));
}

TEST_CASE("MLP gradient matches central differences") {
  Rng rng(13);
  FeatureMatrix x;
  std::vector<int> y;
  blobs(rng, 10, 3, 1.0, x, y);
  ClassifierSpec s = spec_of(ClassifierKind::MLP);
  s.mlp_hidden = 6;
  s.mlp_epochs = 2;
  auto model = fit(s, x, y);
  auto mlp = std::get<MultiLayerPerceptron>(model.params);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd in(3);
    for (auto& v : in) v = rng.uniform(-1.5, 1.5);
    const int label = trial % 2;
    const auto g = mlp.gradient(in, label);
    auto loss = [&] { return mlp.gradient(in, label).loss; };
    CHECK(oracle::check_tensor(mlp.w1, g.w1, loss) < 1e-4);
    CHECK(oracle::check_tensor(mlp.b1, g.b1, loss) < 1e-4);
    CHECK(oracle::check_tensor(mlp.w2, g.w2, loss) < 1e-4);
    CHECK(oracle::check_tensor(mlp.b2, g.b2, loss) < 1e-4);
  }
}

TEST_CASE("every classifier separates well-separated blobs deterministically") {
  Rng rng(14);
  FeatureMatrix x, xt;
  std::vector<int> y, yt;
  blobs(rng, 60, 3, 5.0, x, y);
  blobs(rng, 40, 3, 5.0, xt, yt);
  for (auto kind : {ClassifierKind::GNB, ClassifierKind::DT, ClassifierKind::KNN,
                    ClassifierKind::LR, ClassifierKind::SVM, ClassifierKind::MLP}) {
    CAPTURE(classifier_name(kind));
    const auto m = fit(spec_of(kind), x, y);
    const auto p = predict(m, xt);
    CHECK(p.labels == yt);
    const auto again = predict(fit(spec_of(kind), x, y), xt);
    CHECK(again.scores == p.scores);
    CHECK(parse_classifier_kind(classifier_name(kind)) == kind);
  }
}
