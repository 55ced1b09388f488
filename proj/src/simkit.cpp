#include "avtk/simkit.hpp"

#include <cmath>

#include "avtk/diag.hpp"
#include "avtk/error.hpp"

namespace avtk {

std::string_view metric_name(Metric metric) {
  switch (metric) {
    case Metric::Chi2:
      return "chi2";
    case Metric::Cosine:
      return "cosine";
    case Metric::Euclidean:
      return "euclidean";
    case Metric::Linear:
      return "linear";
    case Metric::Rbf:
      return "rbf";
    case Metric::MeanL1:
      return "mean_l1";
    case Metric::Sigmoid:
      return "sigmoid";
  }
  return "?";
}

void SimilarityParams::validate() const {
  if (gamma && !(*gamma > 0.0)) throw InvalidArgument("gamma must be > 0");
  if (!(chi2_gamma > 0.0)) throw InvalidArgument("chi2 gamma must be > 0");
  if (!std::isfinite(c0)) throw InvalidArgument("c0 must be finite");
}

namespace {

struct Sums {
  double dot = 0, xx = 0, yy = 0, sq = 0, l1 = 0, chi = 0;
};

Sums accumulate(std::span<const double> x, std::span<const double> y) {
  Sums s;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    s.dot += x[i] * y[i];
    s.xx += x[i] * x[i];
    s.yy += y[i] * y[i];
    s.sq += d * d;
    s.l1 += std::abs(d);
    const double denom = x[i] + y[i];
    if (denom > 0.0) s.chi += d * d / denom;
  }
  return s;
}

void check_dims(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw InvalidArgument("similarity: dimension mismatch (" +
                          std::to_string(x.size()) + " vs " +
                          std::to_string(y.size()) + ")");
  }
}

double from_sums(Metric metric, const Sums& s, std::size_t n,
                 const SimilarityParams& p) {
  switch (metric) {
    case Metric::Chi2:
      return std::exp(-p.chi2_gamma * s.chi);
    case Metric::Cosine:
      return s.xx > 0.0 && s.yy > 0.0 ? s.dot / std::sqrt(s.xx * s.yy) : 0.0;
    case Metric::Euclidean:
      return std::sqrt(s.sq);
    case Metric::Linear:
      return s.dot;
    case Metric::Rbf:
      return std::exp(-p.kernel_gamma(n) * s.sq);
    case Metric::MeanL1:
      return n == 0 ? 0.0 : s.l1 / static_cast<double>(n);
    case Metric::Sigmoid:
      return std::tanh(p.kernel_gamma(n) * s.dot + p.c0);
  }
  return 0.0;
}

}  // namespace

double similarity(Metric metric, std::span<const double> x,
                  std::span<const double> y, const SimilarityParams& params) {
  check_dims(x, y);
  return from_sums(metric, accumulate(x, y), x.size(), params);
}

FusionVector fusion_vector(std::span<const double> a, std::span<const double> b,
                           const SimilarityParams& params) {
  check_dims(a, b);
  const Sums s = accumulate(a, b);
  FusionVector out{};
  for (std::size_t m = 0; m < kMetricCount; ++m) {
    out[m] = from_sums(kAllMetrics[m], s, a.size(), params);
  }
  return out;
}

void fusion_backward(std::span<const double> a, std::span<const double> b,
                     const SimilarityParams& params,
                     const FusionVector& grad_out, std::span<double> grad_a,
                     std::span<double> grad_b) {
  check_dims(a, b);
  if (grad_a.size() != a.size() || grad_b.size() != b.size()) {
    throw InvalidArgument("fusion_backward: gradient buffer size mismatch");
  }
  const std::size_t n = a.size();
  const Sums s = accumulate(a, b);
  const FusionVector v = [&] {
    FusionVector out{};
    for (std::size_t m = 0; m < kMetricCount; ++m) {
      out[m] = from_sums(kAllMetrics[m], s, n, params);
    }
    return out;
  }();
  const double g = params.kernel_gamma(n);
  const double inv_n = n == 0 ? 0.0 : 1.0 / static_cast<double>(n);

  const double g_chi = grad_out[0] * (-params.chi2_gamma * v[0]);
  const bool cos_defined = s.xx > 0.0 && s.yy > 0.0;
  const double norm_prod = cos_defined ? std::sqrt(s.xx * s.yy) : 0.0;
  const double g_cos = grad_out[1];
  const double g_euc = v[2] > 0.0 ? grad_out[2] / v[2] : 0.0;
  const double g_lin = grad_out[3];
  const double g_rbf = grad_out[4] * (-2.0 * g * v[4]);
  const double g_l1 = grad_out[5] * inv_n;
  const double g_sig = grad_out[6] * (1.0 - v[6] * v[6]) * g;

  for (std::size_t i = 0; i < n; ++i) {
    const double x = a[i], y = b[i], d = x - y;
    double ga = 0.0, gb = 0.0;
    const double sum = x + y;
    if (sum > 0.0) {
      const double inv = 1.0 / (sum * sum);
      ga += g_chi * d * (x + 3.0 * y) * inv;
      gb += g_chi * -d * (3.0 * x + y) * inv;
    }
    if (cos_defined) {
      ga += g_cos * (y / norm_prod - v[1] * x / s.xx);
      gb += g_cos * (x / norm_prod - v[1] * y / s.yy);
    }
    ga += g_euc * d;
    gb -= g_euc * d;
    ga += g_lin * y;
    gb += g_lin * x;
    ga += g_rbf * d;
    gb -= g_rbf * d;
    const double sign = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
    ga += g_l1 * sign;
    gb -= g_l1 * sign;
    ga += g_sig * y;
    gb += g_sig * x;
    grad_a[i] = ga;
    grad_b[i] = gb;
  }
}

std::vector<double> problem_summary_vector(const ProblemPair& pair,
                                           std::span<const FeatureConfig> configs,
                                           const SimilarityParams& params,
                                           const PosTagger& tagger) {
  if (pair.source_docs.empty() || pair.target_docs.empty()) {
    throw InvalidArgument("pair " + pair.id + " has an empty side");
  }
  params.validate();
  std::vector<double> out;
  out.reserve(configs.size() * kMetricCount);
  for (const auto& config : configs) {
    Eigen::VectorXd x, y;
    try {
      const Vocabulary vocab = build_vocabulary(pair.source_docs, config, tagger);
      auto source = extract_joint(pair.source_docs, vocab, tagger);
      auto target = extract_joint(pair.target_docs, vocab, tagger);
      x = source.nonzeros() ? normalize_unit_interval(source).to_dense()
                            : source.to_dense();
      y = target.nonzeros() ? normalize_unit_interval(target).to_dense()
                            : target.to_dense();
    } catch (const EmptyVocabulary& e) {
      diag::warn("pair " + pair.id + ": " + e.what() +
                 "; using zero-vector metric values");
      x = Eigen::VectorXd::Zero(1);
      y = Eigen::VectorXd::Zero(1);
    }
    const auto fused = fusion_vector(std::span<const double>(x.data(), x.size()),
                                     std::span<const double>(y.data(), y.size()),
                                     params);
    out.insert(out.end(), fused.begin(), fused.end());
  }
  return out;
}

}  // namespace avtk
