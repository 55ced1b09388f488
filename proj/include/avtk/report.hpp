#pragma once

#include <filesystem>
#include <string>

#include "avtk/config.hpp"
#include "avtk/eval.hpp"
#include "avtk/pipeline.hpp"

namespace avtk {

/// Full-precision JSON: metrics, confusion counts, folds and every
/// held-out prediction.
std::string report_json(const EvalReport& report, const RunConfig& config);

/// One row per fold plus an "all" row; metrics rounded to 3 decimals.
std::string report_csv(const EvalReport& report);

/// id,label,<column names...>; missing values are empty fields.
std::string feature_rows_csv(const ExperimentResult& result);

/// Writes report.json, report.csv, te_errors.csv (te methods) or
/// summary_vectors.csv (baselines), and model.avtk (holdout runs) under
/// config.out.
void write_outputs(const ExperimentResult& result, const RunConfig& config);

}  // namespace avtk
