#include "avtk/classify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "avtk/error.hpp"
#include "avtk/rng.hpp"

namespace avtk {

std::string_view classifier_name(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::GNB:
      return "gnb";
    case ClassifierKind::DT:
      return "dt";
    case ClassifierKind::KNN:
      return "knn";
    case ClassifierKind::LR:
      return "lr";
    case ClassifierKind::SVM:
      return "svm";
    case ClassifierKind::MLP:
      return "mlp";
  }
  return "?";
}

ClassifierKind parse_classifier_kind(std::string_view name) {
  for (auto kind : {ClassifierKind::GNB, ClassifierKind::DT, ClassifierKind::KNN,
                    ClassifierKind::LR, ClassifierKind::SVM, ClassifierKind::MLP}) {
    if (classifier_name(kind) == name) return kind;
  }
  throw ConfigError("unknown classifier '" + std::string(name) + "'");
}

namespace {

double sigmoid(double z) {
  return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

// log(1 + e^z) without overflow.
double softplus(double z) {
  return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

void check_rows(const FeatureMatrix& x, std::size_t dim) {
  for (const auto& row : x) {
    if (row.size() != dim) {
      throw InvalidArgument("feature row has " + std::to_string(row.size()) +
                            " columns, expected " + std::to_string(dim));
    }
  }
}

// ---------------------------------------------------------------------------

GaussianNB fit_gnb(const FeatureMatrix& x, std::span<const int> y) {
  const std::size_t d = x.front().size();
  GaussianNB m;
  double count[2] = {0, 0};
  for (int c = 0; c < 2; ++c) {
    m.mean[c].assign(d, 0.0);
    m.variance[c].assign(d, 0.0);
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    count[y[i]] += 1;
    for (std::size_t j = 0; j < d; ++j) m.mean[y[i]][j] += x[i][j];
  }
  for (int c = 0; c < 2; ++c) {
    for (auto& v : m.mean[c]) v /= count[c];
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = x[i][j] - m.mean[y[i]][j];
      m.variance[y[i]][j] += diff * diff;
    }
  }
  for (int c = 0; c < 2; ++c) {
    for (auto& v : m.variance[c]) {
      v = std::max(v / count[c], GaussianNB::kVarianceFloor);
    }
    m.log_prior[c] = std::log(count[c] / static_cast<double>(x.size()));
  }
  return m;
}

double gnb_log_joint(const GaussianNB& m, int c, const FeatureRow& row) {
  constexpr double kLog2Pi = 1.8378770664093453;
  double lp = m.log_prior[c];
  for (std::size_t j = 0; j < row.size(); ++j) {
    const double diff = row[j] - m.mean[c][j];
    lp -= 0.5 * (kLog2Pi + std::log(m.variance[c][j]) +
                 diff * diff / m.variance[c][j]);
  }
  return lp;
}

// ---------------------------------------------------------------------------

struct TreeBuilder {
  const FeatureMatrix& x;
  std::span<const int> y;
  DecisionTree tree;

  static double gini(double pos, double n) {
    if (n <= 0) return 0.0;
    const double p = pos / n;
    return 2.0 * p * (1.0 - p);
  }

  std::int32_t build(std::vector<std::size_t> idx) {
    const auto node_id = static_cast<std::int32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    double pos = 0;
    for (auto i : idx) pos += y[i];
    const double n = static_cast<double>(idx.size());
    tree.nodes[node_id].positive_fraction = pos / n;
    if (pos == 0 || pos == n || idx.size() < 2) return node_id;

    const std::size_t d = x.front().size();
    double best = std::numeric_limits<double>::infinity();
    std::int32_t best_feature = -1;
    double best_threshold = 0.0;
    std::vector<std::size_t> order = idx;
    for (std::size_t f = 0; f < d; ++f) {
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return x[a][f] < x[b][f];
      });
      double left_pos = 0;
      for (std::size_t k = 0; k + 1 < order.size(); ++k) {
        left_pos += y[order[k]];
        const double lo = x[order[k]][f], hi = x[order[k + 1]][f];
        if (!(lo < hi)) continue;
        const double nl = static_cast<double>(k + 1), nr = n - nl;
        const double impurity =
            (nl * gini(left_pos, nl) + nr * gini(pos - left_pos, nr)) / n;
        if (impurity < best - 1e-12) {
          best = impurity;
          best_feature = static_cast<std::int32_t>(f);
          best_threshold = lo + (hi - lo) / 2.0;
        }
      }
    }
    if (best_feature < 0) return node_id;  // identical rows with mixed labels

    std::vector<std::size_t> left, right;
    for (auto i : idx) {
      (x[i][static_cast<std::size_t>(best_feature)] <= best_threshold ? left : right)
          .push_back(i);
    }
    tree.nodes[node_id].feature = best_feature;
    tree.nodes[node_id].threshold = best_threshold;
    const auto l = build(std::move(left));
    const auto r = build(std::move(right));
    tree.nodes[node_id].left = l;
    tree.nodes[node_id].right = r;
    return node_id;
  }
};

double tree_score(const DecisionTree& tree, const FeatureRow& row) {
  std::int32_t node = 0;
  while (tree.nodes[node].feature >= 0) {
    const auto& n = tree.nodes[node];
    node = row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
  return tree.nodes[node].positive_fraction;
}

// ---------------------------------------------------------------------------

double knn_score(const KNearest& m, const FeatureRow& row) {
  std::vector<std::pair<double, std::size_t>> dist;
  dist.reserve(m.points.size());
  for (std::size_t i = 0; i < m.points.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) {
      const double diff = row[j] - m.points[i][j];
      s += diff * diff;
    }
    dist.emplace_back(s, i);
  }
  const std::size_t k = std::min(m.k, dist.size());
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k),
                    dist.end());
  double votes = 0.0;
  for (std::size_t i = 0; i < k; ++i) votes += m.labels[dist[i].second];
  return votes / static_cast<double>(k);
}

// ---------------------------------------------------------------------------

std::vector<Eigen::VectorXd> standardize_all(const Standardizer& s,
                                             const FeatureMatrix& x) {
  std::vector<Eigen::VectorXd> out;
  out.reserve(x.size());
  for (const auto& row : x) out.push_back(s.apply(row));
  return out;
}

LogisticRegression fit_lr(const ClassifierSpec& spec, const FeatureMatrix& x,
                          std::span<const int> y) {
  LogisticRegression m;
  m.standardizer = Standardizer::fit(x);
  const auto rows = standardize_all(m.standardizer, x);
  const auto d = static_cast<Eigen::Index>(x.front().size());
  Eigen::VectorXd w = Eigen::VectorXd::Zero(d), gw;
  double b = 0.0, gb = 0.0;
  double f = LogisticRegression::objective(w, b, rows, y, spec.l2_lambda, &gw, &gb);
  double step = 1.0;
  for (std::size_t it = 0; it < spec.lr_max_iterations; ++it) {
    const double gnorm2 = gw.squaredNorm() + gb * gb;
    if (std::sqrt(gnorm2) < spec.lr_tolerance) break;
    // Armijo backtracking; the step grows again after each success.
    step *= 2.0;
    while (true) {
      const Eigen::VectorXd w_new = w - step * gw;
      const double b_new = b - step * gb;
      const double f_new = LogisticRegression::objective(w_new, b_new, rows, y,
                                                         spec.l2_lambda, nullptr, nullptr);
      if (f_new <= f - 0.5 * step * gnorm2 || step < 1e-20) {
        w = w_new;
        b = b_new;
        break;
      }
      step *= 0.5;
    }
    f = LogisticRegression::objective(w, b, rows, y, spec.l2_lambda, &gw, &gb);
  }
  m.weights = w;
  m.bias = b;
  return m;
}

LinearSVM fit_svm(const ClassifierSpec& spec, const FeatureMatrix& x,
                  std::span<const int> y) {
  LinearSVM m;
  m.standardizer = Standardizer::fit(x);
  const auto rows = standardize_all(m.standardizer, x);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(x.front().size()));
  double b = 0.0;
  Rng rng(spec.seed);
  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), 0);
  const double lambda = spec.svm_lambda;
  std::size_t t = 0;
  for (std::size_t epoch = 0; epoch < spec.svm_epochs; ++epoch) {
    rng.shuffle(std::span(order));
    for (std::size_t i : order) {
      ++t;
      const double eta = 1.0 / (lambda * static_cast<double>(t + 1));
      const double target = y[i] == 1 ? 1.0 : -1.0;
      const double margin = target * (w.dot(rows[i]) + b);
      w *= 1.0 - eta * lambda;
      if (margin < 1.0) {
        w += eta * target * rows[i];
        b += eta * target;
      }
    }
  }
  m.weights = w;
  m.bias = b;
  return m;
}

MultiLayerPerceptron fit_mlp(const ClassifierSpec& spec, const FeatureMatrix& x,
                             std::span<const int> y) {
  MultiLayerPerceptron m;
  m.standardizer = Standardizer::fit(x);
  const auto rows = standardize_all(m.standardizer, x);
  const auto d = static_cast<Eigen::Index>(x.front().size());
  const auto h = static_cast<Eigen::Index>(spec.mlp_hidden);
  if (h == 0) throw ConfigError("MLP hidden size must be >= 1");
  Rng rng(spec.seed);
  auto init = [&](Eigen::Index r, Eigen::Index c) {
    Eigen::MatrixXd w(r, c);
    const double limit = std::sqrt(6.0 / static_cast<double>(r + c));
    for (Eigen::Index j = 0; j < c; ++j) {
      for (Eigen::Index i = 0; i < r; ++i) w(i, j) = rng.uniform(-limit, limit);
    }
    return w;
  };
  m.w1 = init(h, d);
  m.b1 = Eigen::VectorXd::Zero(h);
  m.w2 = init(2, h);
  m.b2 = Eigen::VectorXd::Zero(2);
  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), 0);
  const double lr = spec.mlp_learning_rate;
  for (std::size_t epoch = 0; epoch < spec.mlp_epochs; ++epoch) {
    rng.shuffle(std::span(order));
    for (std::size_t i : order) {
      const auto g = m.gradient(rows[i], y[i]);
      m.w1 -= lr * g.w1;
      m.b1 -= lr * g.b1;
      m.w2 -= lr * g.w2;
      m.b2 -= lr * g.b2;
    }
  }
  return m;
}

}  // namespace

Standardizer Standardizer::fit(const FeatureMatrix& x) {
  Standardizer s;
  const std::size_t d = x.front().size();
  const double n = static_cast<double>(x.size());
  s.mean.assign(d, 0.0);
  s.scale.assign(d, 0.0);
  for (const auto& row : x) {
    for (std::size_t j = 0; j < d; ++j) s.mean[j] += row[j] / n;
  }
  for (const auto& row : x) {
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = row[j] - s.mean[j];
      s.scale[j] += diff * diff / n;
    }
  }
  for (auto& v : s.scale) v = v > 1e-24 ? std::sqrt(v) : 1.0;
  return s;
}

Eigen::VectorXd Standardizer::apply(const FeatureRow& row) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(row.size()));
  for (std::size_t j = 0; j < row.size(); ++j) {
    out[static_cast<Eigen::Index>(j)] = (row[j] - mean[j]) / scale[j];
  }
  return out;
}

double LogisticRegression::objective(const Eigen::VectorXd& w, double b,
                                     const std::vector<Eigen::VectorXd>& rows,
                                     std::span<const int> y, double lambda,
                                     Eigen::VectorXd* grad_w, double* grad_b) {
  double f = 0.5 * lambda * w.squaredNorm();
  if (grad_w) *grad_w = lambda * w;
  if (grad_b) *grad_b = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double z = w.dot(rows[i]) + b;
    f += softplus(z) - y[i] * z;
    const double r = sigmoid(z) - y[i];
    if (grad_w) *grad_w += r * rows[i];
    if (grad_b) *grad_b += r;
  }
  return f;
}

MultiLayerPerceptron::Gradient MultiLayerPerceptron::gradient(const Eigen::VectorXd& x,
                                                              int label) const {
  const Eigen::VectorXd pre = w1 * x + b1;
  const Eigen::VectorXd hidden = pre.cwiseMax(0.0);
  const Eigen::VectorXd logits = w2 * hidden + b2;
  const double mx = logits.maxCoeff();
  Eigen::VectorXd p = (logits.array() - mx).exp().matrix();
  const double z = p.sum();
  p /= z;
  Gradient g;
  g.loss = -(logits[label] - mx - std::log(z));
  Eigen::VectorXd d_logits = p;
  d_logits[label] -= 1.0;
  g.w2 = d_logits * hidden.transpose();
  g.b2 = d_logits;
  Eigen::VectorXd d_hidden = w2.transpose() * d_logits;
  for (Eigen::Index i = 0; i < d_hidden.size(); ++i) {
    if (pre[i] <= 0.0) d_hidden[i] = 0.0;
  }
  g.w1 = d_hidden * x.transpose();
  g.b1 = d_hidden;
  return g;
}

double MultiLayerPerceptron::probability(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd hidden = (w1 * x + b1).cwiseMax(0.0);
  const Eigen::VectorXd logits = w2 * hidden + b2;
  return sigmoid(logits[1] - logits[0]);
}

ClassifierModel fit(const ClassifierSpec& spec, const FeatureMatrix& x,
                    std::span<const int> y) {
  if (x.size() != y.size()) throw InvalidArgument("fit: |X| != |y|");
  if (x.size() < 2) throw InvalidArgument("fit: need at least two examples");
  const std::size_t d = x.front().size();
  if (d == 0) throw InvalidArgument("fit: feature rows are empty");
  check_rows(x, d);
  bool seen[2] = {false, false};
  for (int label : y) {
    if (label != 0 && label != 1) throw InvalidArgument("fit: labels must be 0 or 1");
    seen[label] = true;
  }
  if (!seen[0] || !seen[1]) {
    throw DegenerateLabels("fit: training labels contain a single class");
  }

  ClassifierModel model;
  model.kind = spec.kind;
  model.dimension = d;
  switch (spec.kind) {
    case ClassifierKind::GNB:
      model.params = fit_gnb(x, y);
      break;
    case ClassifierKind::DT: {
      TreeBuilder builder{x, y, {}};
      std::vector<std::size_t> idx(x.size());
      std::iota(idx.begin(), idx.end(), 0);
      builder.build(std::move(idx));
      model.params = std::move(builder.tree);
      break;
    }
    case ClassifierKind::KNN: {
      if (spec.k == 0) throw ConfigError("KNN needs k >= 1");
      model.params = KNearest{spec.k, x, std::vector<int>(y.begin(), y.end())};
      break;
    }
    case ClassifierKind::LR:
      if (!(spec.l2_lambda > 0.0)) throw ConfigError("L2 lambda must be > 0");
      model.params = fit_lr(spec, x, y);
      break;
    case ClassifierKind::SVM:
      if (!(spec.svm_lambda > 0.0)) throw ConfigError("SVM lambda must be > 0");
      model.params = fit_svm(spec, x, y);
      break;
    case ClassifierKind::MLP:
      model.params = fit_mlp(spec, x, y);
      break;
  }
  return model;
}

Predictions predict(const ClassifierModel& model, const FeatureMatrix& x) {
  check_rows(x, model.dimension);
  Predictions out;
  out.labels.reserve(x.size());
  out.scores.reserve(x.size());
  for (const auto& row : x) {
    double score = 0.0;
    int label = 0;
    std::visit(
        [&](const auto& m) {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, GaussianNB>) {
            const double l0 = gnb_log_joint(m, 0, row);
            const double l1 = gnb_log_joint(m, 1, row);
            score = sigmoid(l1 - l0);
            label = l1 > l0 ? 1 : 0;
          } else if constexpr (std::is_same_v<T, DecisionTree>) {
            score = tree_score(m, row);
            label = score > 0.5 ? 1 : 0;
          } else if constexpr (std::is_same_v<T, KNearest>) {
            score = knn_score(m, row);
            label = score > 0.5 ? 1 : 0;
          } else if constexpr (std::is_same_v<T, LogisticRegression>) {
            score = sigmoid(m.weights.dot(m.standardizer.apply(row)) + m.bias);
            label = score > 0.5 ? 1 : 0;
          } else if constexpr (std::is_same_v<T, LinearSVM>) {
            score = m.weights.dot(m.standardizer.apply(row)) + m.bias;
            label = score > 0.0 ? 1 : 0;
          } else {
            score = m.probability(m.standardizer.apply(row));
            label = score > 0.5 ? 1 : 0;
          }
        },
        model.params);
    out.labels.push_back(label);
    out.scores.push_back(score);
  }
  return out;
}

}  // namespace avtk
