#include "avtk/prnn.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "avtk/error.hpp"

namespace avtk {
namespace {

void fill_uniform(Eigen::MatrixXd& m, double lo, double hi, Rng& rng) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = rng.uniform(lo, hi);
  }
}

Eigen::MatrixXd glorot(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Eigen::MatrixXd m(rows, cols);
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  fill_uniform(m, -limit, limit, rng);
  return m;
}

struct ColumnTrace {
  std::span<const std::uint32_t> ids;
  std::vector<Eigen::VectorXd> hidden;  // hidden[0] = h_0 = 0
  Eigen::VectorXd output;
};

ColumnTrace run_column(const PRNNModel& m, std::span<const std::uint32_t> ids) {
  if (ids.empty()) throw InvalidArgument("rnn_encode: empty token sequence");
  ColumnTrace trace;
  trace.ids = ids;
  trace.hidden.reserve(ids.size() + 1);
  trace.hidden.push_back(Eigen::VectorXd::Zero(m.w_hh.rows()));
  for (std::uint32_t id : ids) {
    if (id >= m.embeddings.cols()) throw InvalidArgument("token id out of range");
    Eigen::VectorXd a = m.w_hh * trace.hidden.back() + m.w_hx * m.embeddings.col(id) + m.b;
    trace.hidden.push_back(a.array().tanh().matrix());
  }
  trace.output = m.c + m.w_ho * trace.hidden.back();
  return trace;
}

void backprop_column(const PRNNModel& m, const ColumnTrace& trace,
                     const Eigen::VectorXd& grad_output, PRNNGradient& g) {
  g.c += grad_output;
  g.w_ho += grad_output * trace.hidden.back().transpose();
  Eigen::VectorXd dh = m.w_ho.transpose() * grad_output;
  for (std::size_t t = trace.ids.size(); t >= 1; --t) {
    const Eigen::VectorXd& h = trace.hidden[t];
    const Eigen::VectorXd da =
        dh.cwiseProduct((1.0 - h.array().square()).matrix());
    const std::uint32_t id = trace.ids[t - 1];
    g.w_hh += da * trace.hidden[t - 1].transpose();
    g.w_hx += da * m.embeddings.col(id).transpose();
    g.b += da;
    auto [it, fresh] = g.embeddings.try_emplace(id);
    if (fresh) it->second = Eigen::VectorXd::Zero(m.embeddings.rows());
    it->second += m.w_hx.transpose() * da;
    dh = m.w_hh.transpose() * da;
  }
}

std::span<const double> as_span(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

Eigen::Vector2d logits_of(const PRNNModel& m, const FusionVector& fused) {
  const Eigen::Map<const Eigen::Matrix<double, 7, 1>> v(fused.data());
  return m.w_s * v + m.b_s;
}

PairProbabilities softmax2(const Eigen::Vector2d& logits) {
  const double mx = logits.maxCoeff();
  const double e0 = std::exp(logits[0] - mx), e1 = std::exp(logits[1] - mx);
  return {e0 / (e0 + e1), e1 / (e0 + e1)};
}

PairProbabilities classify_outputs(const PRNNModel& m, const Eigen::VectorXd& os,
                                   const Eigen::VectorXd& ot) {
  return softmax2(logits_of(m, fusion_vector(as_span(os), as_span(ot), m.fusion)));
}

}  // namespace

std::uint32_t PRNNModel::lookup(const std::string& token) const {
  auto it = token_index.find(token);
  return it == token_index.end() ? 0u : it->second;
}

std::vector<std::uint32_t> PRNNModel::lookup(std::span<const std::string> sequence) const {
  std::vector<std::uint32_t> ids;
  ids.reserve(sequence.size());
  for (const auto& t : sequence) ids.push_back(lookup(t));
  return ids;
}

bool operator==(const PRNNModel& a, const PRNNModel& b) {
  return a.tokens == b.tokens && a.embeddings == b.embeddings &&
         a.w_hh == b.w_hh && a.w_hx == b.w_hx && a.w_ho == b.w_ho &&
         a.b == b.b && a.c == b.c && a.w_s == b.w_s && a.b_s == b.b_s &&
         a.fusion.gamma == b.fusion.gamma &&
         a.fusion.chi2_gamma == b.fusion.chi2_gamma && a.fusion.c0 == b.fusion.c0;
}

std::unordered_map<std::string, Eigen::VectorXd> load_embeddings(
    const std::filesystem::path& path, std::size_t embed_dim) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open embeddings file " + path.string());
  std::unordered_map<std::string, Eigen::VectorXd> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string token;
    if (!(fields >> token)) continue;
    std::vector<double> values;
    std::string field;
    while (fields >> field) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(field, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != field.size()) {
        throw FormatError(path.string() + ":" + std::to_string(line_no) +
                          ": '" + field + "' is not a number");
      }
      values.push_back(v);
    }
    if (values.size() != embed_dim) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": " +
                        std::to_string(values.size()) +
                        " components, embedding size is " +
                        std::to_string(embed_dim));
    }
    out[token] = Eigen::Map<Eigen::VectorXd>(values.data(),
                                             static_cast<Eigen::Index>(values.size()));
  }
  return out;
}

PRNNModel init_prnn(const std::vector<std::string>& vocab, const PRNNShape& shape,
                    std::uint64_t seed,
                    const std::optional<std::filesystem::path>& pretrained) {
  if (vocab.empty()) throw InvalidArgument("init_prnn: empty vocabulary");
  if (shape.embed_dim == 0 || shape.hidden_dim == 0) {
    throw ConfigError("PRNN dimensions must be positive");
  }
  PRNNModel m;
  for (const char* special : {kUnknownToken, kSeparatorToken}) {
    m.token_index.emplace(special, static_cast<std::uint32_t>(m.tokens.size()));
    m.tokens.emplace_back(special);
  }
  for (const auto& t : vocab) {
    if (m.token_index.try_emplace(t, static_cast<std::uint32_t>(m.tokens.size())).second) {
      m.tokens.push_back(t);
    }
  }
  const auto e = static_cast<Eigen::Index>(shape.embed_dim);
  const auto h = static_cast<Eigen::Index>(shape.hidden_dim);
  const auto o = static_cast<Eigen::Index>(shape.output_dim ? shape.output_dim
                                                            : shape.hidden_dim);
  Rng rng(seed);
  m.embeddings.resize(e, static_cast<Eigen::Index>(m.tokens.size()));
  fill_uniform(m.embeddings, 0.0, 1.0, rng);
  m.w_hh = glorot(h, h, rng);
  m.w_hx = glorot(h, e, rng);
  m.w_ho = glorot(o, h, rng);
  m.w_s = glorot(2, static_cast<Eigen::Index>(kMetricCount), rng);
  m.b = Eigen::VectorXd::Zero(h);
  m.c = Eigen::VectorXd::Zero(o);
  m.b_s = Eigen::VectorXd::Zero(2);
  if (pretrained) {
    const auto vectors = load_embeddings(*pretrained, shape.embed_dim);
    for (std::size_t col = 0; col < m.tokens.size(); ++col) {
      if (auto it = vectors.find(m.tokens[col]); it != vectors.end()) {
        m.embeddings.col(static_cast<Eigen::Index>(col)) = it->second;
      }
    }
  }
  return m;
}

std::vector<std::string> collect_vocabulary(std::span<const ProblemPair> pairs) {
  std::vector<std::string> out;
  std::unordered_map<std::string, bool> seen;
  auto visit = [&](const std::vector<Document>& docs) {
    for (const auto& d : docs) {
      for (const auto& t : d.tokens) {
        if (seen.try_emplace(t, true).second) out.push_back(t);
      }
    }
  };
  for (const auto& p : pairs) {
    visit(p.source_docs);
    visit(p.target_docs);
  }
  return out;
}

std::vector<std::string> side_tokens(const std::vector<Document>& docs,
                                     std::size_t max_length) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (i) out.emplace_back(kSeparatorToken);
    out.insert(out.end(), docs[i].tokens.begin(), docs[i].tokens.end());
    if (out.size() >= max_length) break;
  }
  if (out.size() > max_length) out.resize(max_length);
  return out;
}

Eigen::VectorXd rnn_encode(const PRNNModel& model,
                           std::span<const std::string> tokens) {
  const auto ids = model.lookup(tokens);
  return rnn_encode_ids(model, ids);
}

Eigen::VectorXd rnn_encode_ids(const PRNNModel& model,
                               std::span<const std::uint32_t> ids) {
  return run_column(model, ids).output;
}

Eigen::VectorXd dropout_mask(std::size_t size, double rate, Rng& rng) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw InvalidArgument("dropout rate must lie in [0, 1)");
  }
  Eigen::VectorXd mask(static_cast<Eigen::Index>(size));
  const double keep_scale = 1.0 / (1.0 - rate);
  for (Eigen::Index i = 0; i < mask.size(); ++i) {
    mask[i] = rate > 0.0 && rng.bernoulli(rate) ? 0.0 : keep_scale;
  }
  return mask;
}

Eigen::VectorXd dropout(const Eigen::VectorXd& v, double rate, Mode mode, Rng& rng) {
  if (mode == Mode::Eval || rate == 0.0) return v;
  return v.cwiseProduct(dropout_mask(static_cast<std::size_t>(v.size()), rate, rng));
}

PairProbabilities prnn_forward(const PRNNModel& model, const ProblemPair& pair,
                               Mode mode, double dropout_rate, Rng& rng,
                               std::size_t max_length) {
  const auto s = model.lookup(side_tokens(pair.source_docs, max_length));
  const auto t = model.lookup(side_tokens(pair.target_docs, max_length));
  const Eigen::VectorXd os = dropout(rnn_encode_ids(model, s), dropout_rate, mode, rng);
  const Eigen::VectorXd ot = dropout(rnn_encode_ids(model, t), dropout_rate, mode, rng);
  return classify_outputs(model, os, ot);
}

PRNNGradient prnn_gradient(const PRNNModel& model,
                           std::span<const std::uint32_t> source,
                           std::span<const std::uint32_t> target, Label label,
                           const Eigen::VectorXd* source_mask,
                           const Eigen::VectorXd* target_mask) {
  if (label == Label::Unknown) throw InvalidArgument("prnn_gradient: unlabeled pair");
  const ColumnTrace cs = run_column(model, source);
  const ColumnTrace ct = run_column(model, target);
  const Eigen::VectorXd os = source_mask ? cs.output.cwiseProduct(*source_mask) : cs.output;
  const Eigen::VectorXd ot = target_mask ? ct.output.cwiseProduct(*target_mask) : ct.output;

  const FusionVector fused = fusion_vector(as_span(os), as_span(ot), model.fusion);
  const Eigen::Vector2d logits = logits_of(model, fused);
  const PairProbabilities p = softmax2(logits);
  const int y = label == Label::Same ? 0 : 1;
  const double mx = logits.maxCoeff();
  const double log_z = mx + std::log(std::exp(logits[0] - mx) + std::exp(logits[1] - mx));

  PRNNGradient g;
  g.loss = log_z - logits[y];
  g.w_hh = Eigen::MatrixXd::Zero(model.w_hh.rows(), model.w_hh.cols());
  g.w_hx = Eigen::MatrixXd::Zero(model.w_hx.rows(), model.w_hx.cols());
  g.w_ho = Eigen::MatrixXd::Zero(model.w_ho.rows(), model.w_ho.cols());
  g.b = Eigen::VectorXd::Zero(model.b.size());
  g.c = Eigen::VectorXd::Zero(model.c.size());

  Eigen::Vector2d d_logits(p.p_same, p.p_diff);
  d_logits[y] -= 1.0;
  const Eigen::Map<const Eigen::Matrix<double, 7, 1>> v(fused.data());
  g.w_s = d_logits * v.transpose();
  g.b_s = d_logits;
  FusionVector d_fused{};
  Eigen::Map<Eigen::Matrix<double, 7, 1>>(d_fused.data()) = model.w_s.transpose() * d_logits;

  Eigen::VectorXd d_os(os.size()), d_ot(ot.size());
  fusion_backward(as_span(os), as_span(ot), model.fusion, d_fused,
                  {d_os.data(), static_cast<std::size_t>(d_os.size())},
                  {d_ot.data(), static_cast<std::size_t>(d_ot.size())});
  if (source_mask) d_os = d_os.cwiseProduct(*source_mask);
  if (target_mask) d_ot = d_ot.cwiseProduct(*target_mask);
  backprop_column(model, cs, d_os, g);
  backprop_column(model, ct, d_ot, g);
  return g;
}

void PRNNTrainSpec::validate() const {
  if (batch_size != 1) throw ConfigError("PRNN training uses batch size 1");
  if (!(learning_rate > 0.0)) throw ConfigError("PRNN learning rate must be > 0");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    throw ConfigError("dropout rate must lie in [0, 1)");
  }
  if (max_sequence_length == 0) throw ConfigError("max sequence length must be >= 1");
  if (!(clip_norm >= 0.0)) throw ConfigError("PRNN clip norm must be >= 0");
}

std::vector<double> prnn_train(PRNNModel& model, std::span<const ProblemPair> pairs,
                               const PRNNTrainSpec& spec) {
  spec.validate();
  struct Encoded {
    std::vector<std::uint32_t> source, target;
    Label label;
  };
  std::vector<Encoded> data;
  data.reserve(pairs.size());
  for (const auto& p : pairs) {
    if (!p.labeled()) {
      throw InvalidArgument("prnn_train: pair " + p.id + " is unlabeled");
    }
    data.push_back({model.lookup(side_tokens(p.source_docs, spec.max_sequence_length)),
                    model.lookup(side_tokens(p.target_docs, spec.max_sequence_length)),
                    p.label});
    if (data.back().source.empty() || data.back().target.empty()) {
      throw InvalidArgument("prnn_train: pair " + p.id + " has an empty side");
    }
  }

  Rng order_rng(mix_seed(spec.rng_seed, 0));
  Rng dropout_rng(mix_seed(spec.rng_seed, 1));
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> trace;
  const double lr = spec.learning_rate;
  const auto out_dim = static_cast<std::size_t>(model.w_ho.rows());
  for (std::size_t epoch = 0; epoch < spec.epochs; ++epoch) {
    order_rng.shuffle(std::span(order));
    double total = 0.0;
    for (std::size_t idx : order) {
      const auto& ex = data[idx];
      const Eigen::VectorXd ms = dropout_mask(out_dim, spec.dropout_rate, dropout_rng);
      const Eigen::VectorXd mt = dropout_mask(out_dim, spec.dropout_rate, dropout_rng);
      PRNNGradient g = prnn_gradient(model, ex.source, ex.target, ex.label, &ms, &mt);
      if (!std::isfinite(g.loss) || !g.w_hh.allFinite() || !g.w_hx.allFinite() ||
          !g.w_ho.allFinite() || !g.w_s.allFinite()) {
        throw TrainingError("PRNN training produced a non-finite value at epoch " +
                            std::to_string(epoch + 1));
      }
      total += g.loss;
      double step = lr;
      if (spec.clip_norm > 0.0) {
        double sq = g.w_hh.squaredNorm() + g.w_hx.squaredNorm() + g.w_ho.squaredNorm() +
                    g.b.squaredNorm() + g.c.squaredNorm() + g.w_s.squaredNorm() +
                    g.b_s.squaredNorm();
        for (const auto& [col, grad] : g.embeddings) sq += grad.squaredNorm();
        const double norm = std::sqrt(sq);
        if (norm > spec.clip_norm) {
          step *= spec.clip_norm / norm;
        }
      }
      model.w_hh -= step * g.w_hh;
      model.w_hx -= step * g.w_hx;
      model.w_ho -= step * g.w_ho;
      model.b -= step * g.b;
      model.c -= step * g.c;
      model.w_s -= step * g.w_s;
      model.b_s -= step * g.b_s;
      for (const auto& [col, grad] : g.embeddings) {
        model.embeddings.col(col) -= step * grad;
      }
    }
    trace.push_back(data.empty() ? 0.0 : total / static_cast<double>(data.size()));
  }
  return trace;
}

std::vector<PairPrediction> prnn_predict(const PRNNModel& model,
                                         std::span<const ProblemPair> pairs,
                                         std::size_t max_length) {
  std::vector<PairPrediction> out;
  out.reserve(pairs.size());
  Rng unused(0);
  for (const auto& p : pairs) {
    const auto probs = prnn_forward(model, p, Mode::Eval, 0.0, unused, max_length);
    out.push_back({probs.p_same >= 0.5 ? Label::Same : Label::Different, probs.p_same});
  }
  return out;
}

}  // namespace avtk
