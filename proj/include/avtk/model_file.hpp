#pragma once

#include <filesystem>
#include <string>

#include "avtk/pipeline.hpp"

namespace avtk {

/// Text model file:
///
///   AVTK <version>
///   method <tag>
///   config_hash <hex>
///   kind <feature|prnn|encoder>
///   payload <byte count>
///   <JSON payload: vocabularies and tensors as decimal arrays>
///
/// Decimal values are written in shortest round-trip form, so a loaded
/// model predicts bit-identically to the saved one.
inline constexpr int kModelFormatVersion = 1;

std::string serialize_model(const TrainedModel& model);
TrainedModel deserialize_model(const std::string& text);

void save_model(const TrainedModel& model, const std::filesystem::path& path);
/// Throws FormatError on a bad header, version, payload or truncation.
TrainedModel load_model(const std::filesystem::path& path);

/// Human-readable summary: method, hash and tensor dimensions.
std::string describe_model(const TrainedModel& model);

}  // namespace avtk
