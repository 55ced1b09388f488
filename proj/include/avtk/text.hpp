#pragma once

#include <functional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace avtk {

struct SplitOptions {
  /// Lowercased words (without the trailing period) that never end a
  /// sentence, e.g. "dr". Empty by default.
  std::set<std::string, std::less<>> abbreviations;
};

/// Splits on hard line breaks and on '.', '!' or '?' followed by
/// whitespace. Sentences are trimmed; empty ones are dropped.
std::vector<std::string> split_sentences(std::string_view text,
                                         const SplitOptions& options = {});

using SentenceSplitter =
    std::function<std::vector<std::string>(std::string_view)>;

/// Lowercases, splits on whitespace and emits every ASCII punctuation
/// character as its own token.
std::vector<std::string> tokenize(std::string_view text);

/// ASCII lowercase; other bytes are copied unchanged.
std::string to_lower(std::string_view text);

/// Lowercases and collapses every whitespace run to one space, trimmed.
std::string normalize_spacing(std::string_view text);

/// Splits UTF-8 text into code points. Invalid bytes become single units.
std::vector<std::string> utf8_units(std::string_view text);

/// Joins with a separator.
std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace avtk
