// avtk command-line front end.
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "avtk/commands.hpp"
#include "avtk/config.hpp"
#include "avtk/error.hpp"

namespace {

// Registers --<key> for every config key. Values are applied after --config.
void add_config_flags(CLI::App* app, std::string& config_path,
                      std::map<std::string, std::string>& overrides) {
  app->add_option("--config", config_path, "key = value config file");
  for (const auto& [key, help] : avtk::RunConfig::keys()) {
    app->add_option("--" + key, overrides[key], help);
  }
}

avtk::RunConfig build_config(CLI::App* app, const std::string& config_path,
                             const std::map<std::string, std::string>& overrides) {
  avtk::RunConfig config;
  if (!config_path.empty()) config = avtk::load_config_file(config_path);
  for (const auto& [key, _] : avtk::RunConfig::keys()) {
    if (app->count("--" + key) > 0) config.set(key, overrides.at(key));
  }
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"avtk: authorship verification toolkit"};
  app.require_subcommand(1);

  auto* prepare = app.add_subcommand("prepare", "normalize a dataset into JSONL pairs");
  avtk::PrepareOptions prep;
  std::string prep_out = "pairs.jsonl";
  prepare->add_option("--source", prep.source, "JSONL file, PAN directory or synthetic:<spec>")
      ->required();
  prepare->add_option("--truth", prep.truth, "truth file for a PAN directory");
  prepare->add_flag("--halve", prep.halve, "augment by splitting documents in half");
  prepare->add_option("--out", prep_out, "output JSONL path");

  auto* run = app.add_subcommand("run", "run an experiment and write reports");
  std::string run_config;
  std::map<std::string, std::string> run_overrides;
  add_config_flags(run, run_config, run_overrides);

  auto* model = app.add_subcommand("model", "save, load or inspect model files");
  model->require_subcommand(1);

  auto* save = model->add_subcommand("save", "train on the configured data and save");
  std::string save_path, save_config, encoder_pair;
  std::map<std::string, std::string> save_overrides;
  save->add_option("path", save_path, "model file")->required();
  save->add_option("--encoder", encoder_pair, "save the encoder of this problem id");
  add_config_flags(save, save_config, save_overrides);

  auto* load = model->add_subcommand("load", "predict a dataset with a saved model");
  std::string load_path, load_data, load_out;
  std::size_t load_threads = 0;
  load->add_option("path", load_path, "model file")->required();
  load->add_option("--data", load_data, "dataset to predict")->required();
  load->add_option("--out", load_out, "CSV output (default stdout)");
  load->add_option("--threads", load_threads, "worker threads (0 = default)");

  auto* inspect = model->add_subcommand("inspect", "print a model summary");
  std::string inspect_path;
  inspect->add_option("path", inspect_path, "model file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*prepare) {
      prep.out = prep_out;
      const std::size_t n = avtk::cmd_prepare(prep);
      std::cerr << "wrote " << n << " pairs to " << prep.out.string() << "\n";
    } else if (*run) {
      const auto config = build_config(run, run_config, run_overrides);
      const auto path = avtk::cmd_run(config, std::cerr);
      std::cout << path.string() << "\n";
    } else if (*save) {
      const auto config = build_config(save, save_config, save_overrides);
      std::optional<std::string> pair;
      if (!encoder_pair.empty()) pair = encoder_pair;
      avtk::cmd_model_save(config, save_path, pair);
    } else if (*load) {
      std::size_t threads = load_threads;
      if (threads == 0) {
        avtk::RunConfig defaults;
        threads = defaults.resolved_threads();
      }
      if (load_out.empty()) {
        avtk::cmd_model_load(load_path, load_data, std::cout, threads);
      } else {
        std::ofstream out(load_out, std::ios::binary);
        if (!out) throw avtk::IoError("cannot write " + load_out);
        avtk::cmd_model_load(load_path, load_data, out, threads);
      }
    } else if (*inspect) {
      avtk::cmd_model_inspect(inspect_path, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "avtk: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
