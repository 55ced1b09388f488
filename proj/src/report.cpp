#include "avtk/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "avtk/error.hpp"
#include "avtk/model_file.hpp"

namespace avtk {
using nlohmann::ordered_json;

namespace {

ordered_json confusion_json(const Confusion& c) {
  return {{"tp", c.tp}, {"fp", c.fp}, {"tn", c.tn}, {"fn", c.fn}};
}

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Quotes a CSV field when needed.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace

std::string report_json(const EvalReport& report, const RunConfig& config) {
  ordered_json j;
  j["config_hash"] = config.hash();
  j["method"] = config.method.tag();
  j["eval"] = config.eval.tag();
  ordered_json settings;
  for (const auto& [key, _] : RunConfig::keys()) {
    if (key == "out" || key == "threads") continue;
    settings[key] = config.get(key);
  }
  j["config"] = std::move(settings);
  j["accuracy"] = report.accuracy;
  j["auc"] = report.auc;
  j["score"] = report.score;
  j["confusion"] = confusion_json(report.confusion);
  if (report.fold_mean_accuracy) {
    j["fold_mean"] = {{"accuracy", *report.fold_mean_accuracy},
                      {"auc", *report.fold_mean_auc},
                      {"score", *report.fold_mean_score}};
  }
  ordered_json folds = ordered_json::array();
  for (const auto& f : report.per_fold) {
    folds.push_back({{"fold", f.fold},
                     {"size", f.size},
                     {"accuracy", f.accuracy},
                     {"auc", f.auc},
                     {"score", f.score},
                     {"confusion", confusion_json(f.confusion)}});
  }
  j["folds"] = std::move(folds);
  ordered_json preds = ordered_json::array();
  for (const auto& p : report.predictions) {
    preds.push_back({{"id", p.id},
                     {"fold", p.fold},
                     {"truth", p.truth},
                     {"predicted", p.predicted},
                     {"score", p.score}});
  }
  j["predictions"] = std::move(preds);
  return j.dump(2) + "\n";
}

std::string report_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "fold,size,accuracy,auc,score,tp,fp,tn,fn\n";
  auto row = [&](const std::string& name, std::size_t size, double acc, double auc,
                 double score, const Confusion& c) {
    out << name << ',' << size << ',' << fixed3(acc) << ',' << fixed3(auc) << ','
        << fixed3(score) << ',' << c.tp << ',' << c.fp << ',' << c.tn << ',' << c.fn
        << '\n';
  };
  for (const auto& f : report.per_fold) {
    row(std::to_string(f.fold), f.size, f.accuracy, f.auc, f.score, f.confusion);
  }
  row("all", report.confusion.total(), report.accuracy, report.auc, report.score,
      report.confusion);
  return out.str();
}

std::string feature_rows_csv(const ExperimentResult& result) {
  std::ostringstream out;
  out << "id,label";
  for (const auto& name : result.column_names) out << ',' << csv_field(name);
  out << '\n';
  for (const auto& row : result.feature_rows) {
    out << csv_field(row.id) << ',' << label_token(row.label);
    for (const auto& v : row.values) {
      out << ',';
      if (v) out << full(*v);
    }
    out << '\n';
  }
  return out.str();
}

void write_outputs(const ExperimentResult& result, const RunConfig& config) {
  std::filesystem::create_directories(config.out);
  write_text(config.out / "report.json", report_json(result.report, config));
  write_text(config.out / "report.csv", report_csv(result.report));
  if (config.method.kind == MethodKind::TransformationEncoder) {
    write_text(config.out / "te_errors.csv", feature_rows_csv(result));
  } else if (config.method.kind == MethodKind::Baseline) {
    write_text(config.out / "summary_vectors.csv", feature_rows_csv(result));
  }
  if (result.model) save_model(*result.model, config.out / "model.avtk");
}

}  // namespace avtk
