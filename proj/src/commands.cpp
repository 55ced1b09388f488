#include "avtk/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "avtk/corpus.hpp"
#include "avtk/error.hpp"
#include "avtk/model_file.hpp"
#include "avtk/pipeline.hpp"
#include "avtk/report.hpp"

namespace avtk {

std::size_t cmd_prepare(const PrepareOptions& options) {
  auto pairs = load_dataset(options.source, options.truth);
  if (options.halve) pairs = augment_by_halving(pairs);
  if (options.out.has_parent_path()) {
    std::filesystem::create_directories(options.out.parent_path());
  }
  save_pairs_jsonl(pairs, options.out);
  return pairs.size();
}

std::filesystem::path cmd_run(const RunConfig& config, std::ostream& log) {
  const ExperimentResult result = run_experiment(config);
  write_outputs(result, config);
  char line[160];
  std::snprintf(line, sizeof line, "%s %s  acc %.3f  auc %.3f  score %.3f\n",
                config.method.tag().c_str(), config.eval.tag().c_str(),
                result.report.accuracy, result.report.auc, result.report.score);
  log << line;
  return config.out / "report.json";
}

void cmd_model_save(const RunConfig& config, const std::filesystem::path& path,
                    const std::optional<std::string>& encoder_pair) {
  const std::string source = config.data.empty() ? config.train : config.data;
  auto pairs = load_dataset(source, config.truth);
  TrainedModel model;
  if (encoder_pair) {
    auto it = std::find_if(pairs.begin(), pairs.end(),
                           [&](const ProblemPair& p) { return p.id == *encoder_pair; });
    if (it == pairs.end()) throw InvalidArgument("no pair with id " + *encoder_pair);
    model = fit_encoder(config, *it);
  } else {
    if (config.augment) pairs = augment_by_halving(pairs);
    model = fit_method(config, pairs);
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  save_model(model, path);
}

void cmd_model_load(const std::filesystem::path& path, const std::string& data,
                    std::ostream& out, std::size_t threads) {
  const TrainedModel model = load_model(path);
  const auto pairs = load_dataset(data);
  char buf[64];
  if (const auto* eb = std::get_if<EncoderBundle>(&model.body)) {
    out << "id,te_error\n";
    const auto errors = encoder_errors(*eb, pairs);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", errors[i]);
      out << pairs[i].id << ',' << buf << '\n';
    }
    return;
  }
  const FoldOutput pred = predict_method(model, pairs, threads);
  out << "id,label,score\n";
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", pred.scores[i]);
    out << pairs[i].id << ',' << (pred.labels[i] == 1 ? "Y" : "N") << ',' << buf << '\n';
  }
}

void cmd_model_inspect(const std::filesystem::path& path, std::ostream& out) {
  out << describe_model(load_model(path));
}

}  // namespace avtk
