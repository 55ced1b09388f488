#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "avtk/corpus.hpp"
#include "avtk/features.hpp"

namespace avtk {

/// Fixed order used by summary and fusion vectors.
enum class Metric { Chi2, Cosine, Euclidean, Linear, Rbf, MeanL1, Sigmoid };

inline constexpr std::array<Metric, 7> kAllMetrics = {
    Metric::Chi2, Metric::Cosine, Metric::Euclidean, Metric::Linear,
    Metric::Rbf,  Metric::MeanL1, Metric::Sigmoid};
inline constexpr std::size_t kMetricCount = kAllMetrics.size();

std::string_view metric_name(Metric metric);

struct SimilarityParams {
  /// Scale for the RBF and sigmoid kernels; 1/n when unset.
  std::optional<double> gamma;
  double chi2_gamma = 1.0;
  double c0 = 0.0;

  double kernel_gamma(std::size_t n) const {
    return gamma ? *gamma : 1.0 / static_cast<double>(n == 0 ? 1 : n);
  }
  void validate() const;
};

/// Kernel or distance between two equal-length vectors.
///
///   Chi2       exp(-g * sum (x-y)^2 / (x+y)), skipping x+y <= 0
///   Cosine     x.y / (|x||y|), 0 when either vector is zero
///   Euclidean  |x-y|
///   Linear     x.y
///   RBF        exp(-g |x-y|^2)
///   MeanL1     sum |x-y| / n
///   Sigmoid    tanh(g x.y + c0)
double similarity(Metric metric, std::span<const double> x,
                  std::span<const double> y, const SimilarityParams& params = {});

using FusionVector = std::array<double, kMetricCount>;

/// All seven metrics between two dense vectors.
FusionVector fusion_vector(std::span<const double> a, std::span<const double> b,
                           const SimilarityParams& params = {});

/// Backpropagates dL/dV through fusion_vector. Writes dL/da and dL/db.
/// Non-differentiable points (a == b for Euclidean, a_i == b_i for MeanL1)
/// use a zero subgradient.
void fusion_backward(std::span<const double> a, std::span<const double> b,
                     const SimilarityParams& params, const FusionVector& grad_out,
                     std::span<double> grad_a, std::span<double> grad_b);

/// Baseline representation of a problem: for each feature config, the
/// seven metrics between the whole source (all source documents) and the
/// whole target, both represented over the source-only vocabulary and
/// max-normalized. One block of seven metrics per config, in config order.
std::vector<double> problem_summary_vector(
    const ProblemPair& pair, std::span<const FeatureConfig> configs,
    const SimilarityParams& params = {},
    const PosTagger& tagger = builtin_tagger());

}  // namespace avtk
