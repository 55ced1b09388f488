#include "avtk/model_file.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "avtk/error.hpp"

namespace avtk {
using nlohmann::json;

namespace {

json matrix_json(const Eigen::MatrixXd& m) {
  json data = json::array();
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) data.push_back(m(i, j));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Eigen::MatrixXd matrix_from(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto& data = j.at("data");
  if (rows < 0 || cols < 0 || data.size() != static_cast<std::size_t>(rows * cols)) {
    throw FormatError("tensor size does not match its shape");
  }
  Eigen::MatrixXd m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = data[k++].get<double>();
  }
  return m;
}

json vector_json(const Eigen::VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd vector_from(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(values.data(),
                                           static_cast<Eigen::Index>(values.size()));
}

json similarity_json(const SimilarityParams& p) {
  return {{"gamma", p.gamma ? json(*p.gamma) : json(nullptr)},
          {"chi2_gamma", p.chi2_gamma},
          {"c0", p.c0}};
}

SimilarityParams similarity_from(const json& j) {
  SimilarityParams p;
  if (!j.at("gamma").is_null()) p.gamma = j.at("gamma").get<double>();
  p.chi2_gamma = j.at("chi2_gamma").get<double>();
  p.c0 = j.at("c0").get<double>();
  return p;
}

json standardizer_json(const Standardizer& s) {
  return {{"mean", s.mean}, {"scale", s.scale}};
}

Standardizer standardizer_from(const json& j) {
  return {j.at("mean").get<std::vector<double>>(),
          j.at("scale").get<std::vector<double>>()};
}

json classifier_json(const ClassifierModel& model) {
  json j = {{"kind", classifier_name(model.kind)}, {"dimension", model.dimension}};
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, GaussianNB>) {
          j["log_prior"] = {m.log_prior[0], m.log_prior[1]};
          j["mean"] = {m.mean[0], m.mean[1]};
          j["variance"] = {m.variance[0], m.variance[1]};
        } else if constexpr (std::is_same_v<T, DecisionTree>) {
          json nodes = json::array();
          for (const auto& n : m.nodes) {
            nodes.push_back({n.feature, n.threshold, n.left, n.right,
                             n.positive_fraction});
          }
          j["nodes"] = std::move(nodes);
        } else if constexpr (std::is_same_v<T, KNearest>) {
          j["k"] = m.k;
          j["points"] = m.points;
          j["labels"] = m.labels;
        } else if constexpr (std::is_same_v<T, LogisticRegression> ||
                             std::is_same_v<T, LinearSVM>) {
          j["standardizer"] = standardizer_json(m.standardizer);
          j["weights"] = vector_json(m.weights);
          j["bias"] = m.bias;
        } else {
          j["standardizer"] = standardizer_json(m.standardizer);
          j["w1"] = matrix_json(m.w1);
          j["b1"] = vector_json(m.b1);
          j["w2"] = matrix_json(m.w2);
          j["b2"] = vector_json(m.b2);
        }
      },
      model.params);
  return j;
}

ClassifierModel classifier_from(const json& j) {
  ClassifierModel model;
  model.kind = parse_classifier_kind(j.at("kind").get<std::string>());
  model.dimension = j.at("dimension").get<std::size_t>();
  switch (model.kind) {
    case ClassifierKind::GNB: {
      GaussianNB m;
      for (int c = 0; c < 2; ++c) {
        m.log_prior[c] = j.at("log_prior").at(c).get<double>();
        m.mean[c] = j.at("mean").at(c).get<std::vector<double>>();
        m.variance[c] = j.at("variance").at(c).get<std::vector<double>>();
      }
      model.params = std::move(m);
      break;
    }
    case ClassifierKind::DT: {
      DecisionTree m;
      for (const auto& n : j.at("nodes")) {
        m.nodes.push_back({n.at(0).get<std::int32_t>(), n.at(1).get<double>(),
                           n.at(2).get<std::int32_t>(), n.at(3).get<std::int32_t>(),
                           n.at(4).get<double>()});
      }
      const auto count = static_cast<std::int32_t>(m.nodes.size());
      for (const auto& n : m.nodes) {
        if (n.feature >= 0 && (n.left <= 0 || n.left >= count || n.right <= 0 ||
                               n.right >= count)) {
          throw FormatError("decision tree child index out of range");
        }
      }
      if (m.nodes.empty()) throw FormatError("decision tree without nodes");
      model.params = std::move(m);
      break;
    }
    case ClassifierKind::KNN:
      model.params = KNearest{j.at("k").get<std::size_t>(),
                              j.at("points").get<FeatureMatrix>(),
                              j.at("labels").get<std::vector<int>>()};
      break;
    case ClassifierKind::LR:
      model.params = LogisticRegression{standardizer_from(j.at("standardizer")),
                                        vector_from(j.at("weights")),
                                        j.at("bias").get<double>()};
      break;
    case ClassifierKind::SVM:
      model.params = LinearSVM{standardizer_from(j.at("standardizer")),
                               vector_from(j.at("weights")), j.at("bias").get<double>()};
      break;
    case ClassifierKind::MLP:
      model.params = MultiLayerPerceptron{
          standardizer_from(j.at("standardizer")), matrix_from(j.at("w1")),
          vector_from(j.at("b1")), matrix_from(j.at("w2")), vector_from(j.at("b2"))};
      break;
  }
  return model;
}

json config_names(const std::vector<FeatureConfig>& configs) {
  json names = json::array();
  for (const auto& c : configs) names.push_back(config_name(c));
  return names;
}

json te_spec_json(const TETrainSpec& te) {
  return {{"epochs", te.epochs}, {"learning_rate", te.learning_rate},
          {"seed", te.rng_seed}};
}

TETrainSpec te_spec_from(const json& j) {
  TETrainSpec te;
  te.epochs = j.at("epochs").get<std::size_t>();
  te.learning_rate = j.at("learning_rate").get<double>();
  te.rng_seed = j.at("seed").get<std::uint64_t>();
  return te;
}

const char* body_kind(const TrainedModel& model) {
  switch (model.body.index()) {
    case 0:
      return "feature";
    case 1:
      return "prnn";
    default:
      return "encoder";
  }
}

json payload_json(const TrainedModel& model) {
  if (const auto* fm = std::get_if<FeatureModel>(&model.body)) {
    const auto& r = fm->recipe;
    return {{"recipe",
             {{"kind", r.kind == MethodKind::TransformationEncoder ? "te" : "baseline"},
              {"configs", config_names(r.configs)},
              {"window", r.window},
              {"te", te_spec_json(r.te)},
              {"similarity", similarity_json(r.similarity)}}},
            {"kept_columns", fm->kept_columns},
            {"classifier", classifier_json(fm->classifier)}};
  }
  if (const auto* pb = std::get_if<PrnnBundle>(&model.body)) {
    const auto& n = pb->network;
    return {{"max_length", pb->max_length},
            {"tokens", n.tokens},
            {"embeddings", matrix_json(n.embeddings)},
            {"w_hh", matrix_json(n.w_hh)},
            {"w_hx", matrix_json(n.w_hx)},
            {"w_ho", matrix_json(n.w_ho)},
            {"b", vector_json(n.b)},
            {"c", vector_json(n.c)},
            {"w_s", matrix_json(n.w_s)},
            {"b_s", vector_json(n.b_s)},
            {"fusion", similarity_json(n.fusion)}};
  }
  const auto& eb = std::get<EncoderBundle>(model.body);
  return {{"pair_id", eb.pair_id},
          {"config", config_name(eb.config)},
          {"window", eb.window},
          {"vocabulary", eb.vocabulary.features()},
          {"weights", matrix_json(eb.encoder.weights)},
          {"bias", vector_json(eb.encoder.bias)},
          {"bias_out", vector_json(eb.encoder.bias_out)}};
}

void parse_payload(const std::string& kind, const json& j, TrainedModel& model) {
  if (kind == "feature") {
    FeatureModel fm;
    const auto& r = j.at("recipe");
    fm.recipe.kind = r.at("kind").get<std::string>() == "te"
                         ? MethodKind::TransformationEncoder
                         : MethodKind::Baseline;
    for (const auto& name : r.at("configs")) {
      fm.recipe.configs.push_back(parse_config_name(name.get<std::string>()));
    }
    fm.recipe.window = r.at("window").get<std::size_t>();
    fm.recipe.te = te_spec_from(r.at("te"));
    fm.recipe.similarity = similarity_from(r.at("similarity"));
    fm.kept_columns = j.at("kept_columns").get<std::vector<std::size_t>>();
    fm.classifier = classifier_from(j.at("classifier"));
    if (fm.kept_columns.size() != fm.classifier.dimension) {
      throw FormatError("kept columns do not match the classifier dimension");
    }
    model.body = std::move(fm);
  } else if (kind == "prnn") {
    PrnnBundle pb;
    pb.max_length = j.at("max_length").get<std::size_t>();
    auto& n = pb.network;
    n.tokens = j.at("tokens").get<std::vector<std::string>>();
    for (std::size_t i = 0; i < n.tokens.size(); ++i) {
      n.token_index.emplace(n.tokens[i], static_cast<std::uint32_t>(i));
    }
    n.embeddings = matrix_from(j.at("embeddings"));
    n.w_hh = matrix_from(j.at("w_hh"));
    n.w_hx = matrix_from(j.at("w_hx"));
    n.w_ho = matrix_from(j.at("w_ho"));
    n.b = vector_from(j.at("b"));
    n.c = vector_from(j.at("c"));
    n.w_s = matrix_from(j.at("w_s"));
    n.b_s = vector_from(j.at("b_s"));
    n.fusion = similarity_from(j.at("fusion"));
    const auto h = n.w_hh.rows();
    if (n.embeddings.cols() != static_cast<Eigen::Index>(n.tokens.size()) ||
        n.w_hh.cols() != h || n.w_hx.rows() != h ||
        n.w_hx.cols() != n.embeddings.rows() || n.w_ho.cols() != h ||
        n.b.size() != h || n.c.size() != n.w_ho.rows() || n.w_s.rows() != 2 ||
        n.w_s.cols() != static_cast<Eigen::Index>(kMetricCount) || n.b_s.size() != 2) {
      throw FormatError("PRNN tensor shapes are inconsistent");
    }
    model.body = std::move(pb);
  } else if (kind == "encoder") {
    EncoderBundle eb;
    eb.pair_id = j.at("pair_id").get<std::string>();
    eb.config = parse_config_name(j.at("config").get<std::string>());
    eb.window = j.at("window").get<std::size_t>();
    eb.vocabulary = Vocabulary(eb.config);
    for (const auto& f : j.at("vocabulary")) eb.vocabulary.insert(f.get<std::string>());
    eb.encoder.weights = matrix_from(j.at("weights"));
    eb.encoder.bias = vector_from(j.at("bias"));
    eb.encoder.bias_out = vector_from(j.at("bias_out"));
    const auto d = static_cast<Eigen::Index>(eb.vocabulary.dimension());
    if (eb.encoder.weights.rows() != d || eb.encoder.bias_out.size() != d ||
        eb.encoder.bias.size() != eb.encoder.weights.cols()) {
      throw FormatError("encoder tensor shapes are inconsistent");
    }
    model.body = std::move(eb);
  } else {
    throw FormatError("unknown model kind '" + kind + "'");
  }
}

std::string expect_field(std::istream& in, const std::string& name) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("model file truncated before '" + name + "'");
  const std::string prefix = name + " ";
  if (!line.starts_with(prefix)) {
    throw FormatError("model file: expected '" + name + "' header line");
  }
  return line.substr(prefix.size());
}

}  // namespace

std::string serialize_model(const TrainedModel& model) {
  const std::string payload = payload_json(model).dump();
  std::ostringstream out;
  out << "AVTK " << kModelFormatVersion << '\n'
      << "method " << model.method.tag() << '\n'
      << "config_hash " << model.config_hash << '\n'
      << "kind " << body_kind(model) << '\n'
      << "payload " << payload.size() << '\n'
      << payload << '\n';
  return out.str();
}

TrainedModel deserialize_model(const std::string& text) {
  std::istringstream in(text);
  const std::string version = expect_field(in, "AVTK");
  if (version != std::to_string(kModelFormatVersion)) {
    throw FormatError("unsupported model format version '" + version + "'");
  }
  TrainedModel model;
  try {
    model.method = Method::parse(expect_field(in, "method"));
  } catch (const ConfigError& e) {
    throw FormatError(std::string("model file: ") + e.what());
  }
  model.config_hash = expect_field(in, "config_hash");
  const std::string kind = expect_field(in, "kind");
  std::size_t size = 0;
  try {
    size = std::stoull(expect_field(in, "payload"));
  } catch (const std::logic_error&) {
    throw FormatError("model file: bad payload size");
  }
  std::string payload(size, '\0');
  in.read(payload.data(), static_cast<std::streamsize>(size));
  if (static_cast<std::size_t>(in.gcount()) != size) {
    throw FormatError("model file truncated: payload shorter than declared");
  }
  try {
    parse_payload(kind, json::parse(payload), model);
  } catch (const json::exception& e) {
    throw FormatError(std::string("model payload: ") + e.what());
  } catch (const ConfigError& e) {
    throw FormatError(std::string("model payload: ") + e.what());
  }
  return model;
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << serialize_model(model);
  if (!out) throw IoError("failed writing " + path.string());
}

TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_model(buf.str());
}

std::string describe_model(const TrainedModel& model) {
  std::ostringstream out;
  out << "method       " << model.method.tag() << '\n'
      << "config hash  " << model.config_hash << '\n'
      << "kind         " << body_kind(model) << '\n';
  if (const auto* fm = std::get_if<FeatureModel>(&model.body)) {
    out << "features     ";
    for (std::size_t i = 0; i < fm->recipe.configs.size(); ++i) {
      out << (i ? "," : "") << config_name(fm->recipe.configs[i]);
    }
    out << '\n'
        << "columns      " << fm->kept_columns.size() << " of "
        << fm->recipe.column_names().size() << '\n'
        << "classifier   " << classifier_name(fm->classifier.kind) << " (input "
        << fm->classifier.dimension << ")\n";
    if (fm->recipe.kind == MethodKind::TransformationEncoder) {
      out << "window       " << fm->recipe.window << '\n'
          << "te epochs    " << fm->recipe.te.epochs << ", lr "
          << fm->recipe.te.learning_rate << '\n';
    }
  } else if (const auto* pb = std::get_if<PrnnBundle>(&model.body)) {
    const auto& n = pb->network;
    out << "vocabulary   " << n.vocab_size() << '\n'
        << "embed dim    " << n.embed_dim() << '\n'
        << "hidden dim   " << n.hidden_dim() << '\n'
        << "output dim   " << n.output_dim() << '\n'
        << "max length   " << pb->max_length << '\n';
  } else {
    const auto& eb = std::get<EncoderBundle>(model.body);
    out << "pair         " << eb.pair_id << '\n'
        << "feature set  " << config_name(eb.config) << '\n'
        << "d            " << eb.encoder.input_dim() << '\n'
        << "d'           " << eb.encoder.hidden_dim() << '\n';
  }
  return out.str();
}

}  // namespace avtk
