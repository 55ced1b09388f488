#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace avtk {

using FeatureRow = std::vector<double>;
using FeatureMatrix = std::vector<FeatureRow>;

enum class ClassifierKind { GNB, DT, KNN, LR, SVM, MLP };

std::string_view classifier_name(ClassifierKind kind);  // "gnb", "dt", ...
ClassifierKind parse_classifier_kind(std::string_view name);

struct ClassifierSpec {
  ClassifierKind kind = ClassifierKind::GNB;
  std::size_t k = 3;
  double l2_lambda = 1.0;
  double lr_tolerance = 1e-6;
  std::size_t lr_max_iterations = 200000;
  double svm_lambda = 1e-2;
  std::size_t svm_epochs = 200;
  std::size_t mlp_hidden = 100;
  std::size_t mlp_epochs = 200;
  double mlp_learning_rate = 0.01;
  std::uint64_t seed = 0;
};

/// Z-scoring fitted on training rows; constant columns keep scale 1.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer fit(const FeatureMatrix& x);
  Eigen::VectorXd apply(const FeatureRow& row) const;
};

struct GaussianNB {
  static constexpr double kVarianceFloor = 1e-9;
  double log_prior[2] = {0.0, 0.0};
  std::vector<double> mean[2];
  std::vector<double> variance[2];
};

struct DecisionTree {
  struct Node {
    std::int32_t feature = -1;  // -1 marks a leaf
    double threshold = 0.0;     // x[feature] <= threshold goes left
    std::int32_t left = -1;
    std::int32_t right = -1;
    double positive_fraction = 0.0;
  };
  std::vector<Node> nodes;  // nodes[0] is the root
};

struct KNearest {
  std::size_t k = 3;
  FeatureMatrix points;
  std::vector<int> labels;
};

struct LogisticRegression {
  Standardizer standardizer;
  Eigen::VectorXd weights;
  double bias = 0.0;

  /// sum_i log(1 + e^{z_i}) - y_i z_i + lambda/2 |w|^2 over standardized
  /// rows, z = w.x + b. Fills the gradient when the outputs are non-null.
  static double objective(const Eigen::VectorXd& w, double b,
                          const std::vector<Eigen::VectorXd>& rows,
                          std::span<const int> y, double lambda,
                          Eigen::VectorXd* grad_w, double* grad_b);
};

struct LinearSVM {
  Standardizer standardizer;
  Eigen::VectorXd weights;
  double bias = 0.0;
};

/// One ReLU hidden layer and a two-way softmax output.
struct MultiLayerPerceptron {
  Standardizer standardizer;
  Eigen::MatrixXd w1;  // H x D
  Eigen::VectorXd b1;
  Eigen::MatrixXd w2;  // 2 x H
  Eigen::VectorXd b2;

  struct Gradient {
    Eigen::MatrixXd w1, w2;
    Eigen::VectorXd b1, b2;
    double loss = 0.0;
  };
  /// Cross-entropy of one standardized row and its gradient.
  Gradient gradient(const Eigen::VectorXd& x, int label) const;
  /// p(class 1) for a standardized row.
  double probability(const Eigen::VectorXd& x) const;
};

struct ClassifierModel {
  ClassifierKind kind = ClassifierKind::GNB;
  std::size_t dimension = 0;
  std::variant<GaussianNB, DecisionTree, KNearest, LogisticRegression,
               LinearSVM, MultiLayerPerceptron>
      params;
};

/// Labels are 0/1. Throws DegenerateLabels when only one class occurs.
ClassifierModel fit(const ClassifierSpec& spec, const FeatureMatrix& x,
                    std::span<const int> y);

struct Predictions {
  std::vector<int> labels;
  /// Increasing in class-1 confidence: posterior (GNB, LR, MLP), vote
  /// fraction (KNN), leaf class-1 fraction (DT), signed margin (SVM).
  std::vector<double> scores;
};

Predictions predict(const ClassifierModel& model, const FeatureMatrix& x);

}  // namespace avtk
