#include "avtk/te.hpp"

#include <algorithm>
#include <cmath>

#include "avtk/diag.hpp"
#include "avtk/error.hpp"
#include "avtk/rng.hpp"

namespace avtk {
namespace {

constexpr double kClampEps = 1e-12;

Eigen::VectorXd logistic(const Eigen::VectorXd& a) {
  return a.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

Eigen::VectorXd normalized_dense(const SparseVector& v) {
  return v.nonzeros() ? normalize_unit_interval(v).to_dense() : v.to_dense();
}

}  // namespace

std::size_t te_hidden_size(std::size_t input_dim) {
  return input_dim <= 1 ? 1 : (input_dim + 1) / 2;
}

TEModel te_zero_model(std::size_t input_dim) {
  const auto d = static_cast<Eigen::Index>(input_dim);
  const auto h = static_cast<Eigen::Index>(te_hidden_size(input_dim));
  return {Eigen::MatrixXd::Zero(d, h), Eigen::VectorXd::Zero(h),
          Eigen::VectorXd::Zero(d)};
}

TEModel te_init(std::size_t input_dim, std::uint64_t seed) {
  if (input_dim == 0) throw InvalidArgument("TE input dimension must be >= 1");
  TEModel model = te_zero_model(input_dim);
  const double limit = std::sqrt(
      6.0 / static_cast<double>(input_dim + te_hidden_size(input_dim)));
  Rng rng(seed);
  for (Eigen::Index j = 0; j < model.weights.cols(); ++j) {
    for (Eigen::Index i = 0; i < model.weights.rows(); ++i) {
      model.weights(i, j) = rng.uniform(-limit, limit);
    }
  }
  return model;
}

TEActivations te_forward(const TEModel& model, const Eigen::VectorXd& source) {
  if (source.size() != model.weights.rows()) {
    throw InvalidArgument("te_forward: input has dimension " +
                          std::to_string(source.size()) + ", model expects " +
                          std::to_string(model.weights.rows()));
  }
  TEActivations act;
  act.hidden = logistic(model.weights.transpose() * source + model.bias);
  act.output = logistic(model.weights * act.hidden + model.bias_out);
  return act;
}

namespace {

// Counts saturated components instead of warning on each evaluation.
double loss_counting(const Eigen::VectorXd& target, const Eigen::VectorXd& output,
                     std::size_t& saturated) {
  double loss = 0.0;
  for (Eigen::Index i = 0; i < target.size(); ++i) {
    const double z = output[i];
    if (z == 0.0 || z == 1.0) ++saturated;
    const double zc = std::clamp(z, kClampEps, 1.0 - kClampEps);
    const double t = target[i];
    loss -= t * std::log(zc) + (1.0 - t) * std::log(1.0 - zc);
  }
  return loss;
}

void warn_saturated(const char* where, std::size_t saturated) {
  if (saturated == 0) return;
  diag::warn(std::string(where) + ": " + std::to_string(saturated) +
             " output components saturated at 0 or 1; clamped");
}

}  // namespace

double te_loss(const Eigen::VectorXd& target, const Eigen::VectorXd& output) {
  if (target.size() != output.size()) {
    throw InvalidArgument("te_loss: dimension mismatch");
  }
  std::size_t saturated = 0;
  const double loss = loss_counting(target, output, saturated);
  warn_saturated("te_loss", saturated);
  return loss;
}

namespace {

TEGradient gradient_impl(const TEModel& model, const Eigen::VectorXd& source,
                         const Eigen::VectorXd& target, std::size_t& saturated) {
  if (target.size() != model.weights.rows()) {
    throw InvalidArgument("te_gradient: target dimension mismatch");
  }
  const TEActivations act = te_forward(model, source);
  TEGradient grad;
  grad.loss = loss_counting(target, act.output, saturated);
  // Sigmoid + cross-entropy: dL/d(pre-activation) = z - t.
  const Eigen::VectorXd delta_out = act.output - target;
  const Eigen::VectorXd delta_hidden =
      (model.weights.transpose() * delta_out).cwiseProduct(
          act.hidden.cwiseProduct(Eigen::VectorXd::Ones(act.hidden.size()) - act.hidden));
  grad.weights = delta_out * act.hidden.transpose() + source * delta_hidden.transpose();
  grad.bias = delta_hidden;
  grad.bias_out = delta_out;
  return grad;
}

}  // namespace

TEGradient te_gradient(const TEModel& model, const Eigen::VectorXd& source,
                       const Eigen::VectorXd& target) {
  std::size_t saturated = 0;
  TEGradient g = gradient_impl(model, source, target, saturated);
  warn_saturated("te_loss", saturated);
  return g;
}

void TETrainSpec::validate() const {
  if (batch_size != 1) throw ConfigError("TE training uses batch size 1");
  if (!(learning_rate > 0.0)) throw ConfigError("TE learning rate must be > 0");
}

TETrainResult te_train(std::span<const Eigen::VectorXd> sources,
                       const Eigen::VectorXd& target, const TETrainSpec& spec) {
  spec.validate();
  if (sources.empty()) throw InvalidArgument("te_train: no source vectors");
  const auto d = target.size();
  for (const auto& s : sources) {
    if (s.size() != d) throw InvalidArgument("te_train: dimension mismatch");
  }
  for (Eigen::Index i = 0; i < d; ++i) {
    if (!(target[i] >= 0.0 && target[i] <= 1.0)) {
      throw InvalidArgument("te_train: target values must lie in [0, 1]");
    }
  }

  TETrainResult result{te_init(static_cast<std::size_t>(d), spec.rng_seed), {}};
  TEModel& model = result.model;
  std::size_t saturated = 0;
  for (std::size_t epoch = 0; epoch < spec.epochs; ++epoch) {
    double total = 0.0;
    for (const auto& source : sources) {
      TEGradient g = gradient_impl(model, source, target, saturated);
      if (!std::isfinite(g.loss) || !g.weights.allFinite() ||
          !g.bias.allFinite() || !g.bias_out.allFinite()) {
        throw TrainingError("TE training diverged at epoch " +
                            std::to_string(epoch + 1));
      }
      total += g.loss;
      model.weights -= spec.learning_rate * g.weights;
      model.bias -= spec.learning_rate * g.bias;
      model.bias_out -= spec.learning_rate * g.bias_out;
    }
    result.loss_trace.push_back(total / static_cast<double>(sources.size()));
  }
  warn_saturated("te_train", saturated);
  return result;
}

bool TEErrorVector::complete() const {
  for (const auto& e : errors) {
    if (!e) return false;
  }
  return true;
}

TEProblemData te_problem_data(const ProblemPair& pair, const FeatureConfig& config,
                              std::size_t window, const PosTagger& tagger) {
  if (pair.source_docs.empty() || pair.target_docs.empty()) {
    throw InvalidArgument("pair " + pair.id + " has an empty side");
  }
  const auto source_windows = expand_all(pair.source_docs, window);
  const auto target_windows = expand_all(pair.target_docs, window);
  const Vocabulary vocab = build_vocabulary(source_windows, config, tagger);

  TEProblemData data;
  for (const auto& w : source_windows) {
    data.sources.push_back(normalized_dense(extract(w, vocab, tagger)));
  }
  std::vector<SparseVector> targets;
  for (const auto& w : target_windows) {
    auto v = extract(w, vocab, tagger);
    targets.push_back(v.nonzeros() ? normalize_unit_interval(v) : v);
  }
  data.target = average_vector(targets).to_dense();
  return data;
}

double te_mean_error(const TEModel& model, std::span<const Eigen::VectorXd> sources,
                     const Eigen::VectorXd& target) {
  if (sources.empty()) throw InvalidArgument("te_mean_error: no sources");
  double total = 0.0;
  std::size_t saturated = 0;
  for (const auto& s : sources) {
    total += loss_counting(target, te_forward(model, s).output, saturated);
  }
  warn_saturated("te_mean_error", saturated);
  return total / static_cast<double>(sources.size());
}

TEErrorVector te_error_vector(const ProblemPair& pair,
                              std::span<const FeatureConfig> configs,
                              std::size_t window, const TETrainSpec& spec,
                              const PosTagger& tagger) {
  TEErrorVector out;
  for (std::size_t k = 0; k < configs.size(); ++k) {
    TEProblemData data;
    try {
      data = te_problem_data(pair, configs[k], window, tagger);
    } catch (const EmptyVocabulary& e) {
      diag::warn("pair " + pair.id + ": " + e.what() + "; error skipped");
      out.errors.emplace_back(std::nullopt);
      continue;
    }
    TETrainSpec config_spec = spec;
    config_spec.rng_seed = mix_seed(spec.rng_seed, k);
    const auto trained = te_train(data.sources, data.target, config_spec);
    out.errors.emplace_back(te_mean_error(trained.model, data.sources, data.target));
  }
  return out;
}

}  // namespace avtk
