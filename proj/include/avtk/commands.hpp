#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "avtk/config.hpp"

namespace avtk {

struct PrepareOptions {
  std::string source;  // JSONL, PAN directory or synthetic:<spec>
  std::string truth;
  bool halve = false;
  std::filesystem::path out = "pairs.jsonl";
};

/// Normalizes a dataset into JSONL pairs. Returns the number of pairs.
std::size_t cmd_prepare(const PrepareOptions& options);

/// Runs an experiment and writes its outputs. Returns the report path.
std::filesystem::path cmd_run(const RunConfig& config, std::ostream& log);

/// Trains on config.data (or config.train) and saves to `path`. With
/// `encoder_pair`, saves the transformation encoder of that problem instead.
void cmd_model_save(const RunConfig& config, const std::filesystem::path& path,
                    const std::optional<std::string>& encoder_pair = std::nullopt);

/// Predicts `data` with a saved model and writes id,label,score rows.
void cmd_model_load(const std::filesystem::path& path, const std::string& data,
                    std::ostream& out, std::size_t threads);

void cmd_model_inspect(const std::filesystem::path& path, std::ostream& out);

}  // namespace avtk
