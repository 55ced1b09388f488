#include "avtk/text.hpp"

#include <cctype>

namespace avtk {
namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool is_terminal(char c) { return c == '.' || c == '!' || c == '?'; }

bool is_ascii_punct(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u < 0x80 && std::ispunct(u);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

// Word immediately before position `end` (exclusive), lowercased.
std::string last_word(std::string_view s, std::size_t end) {
  std::size_t begin = end;
  while (begin > 0 && !is_space(s[begin - 1])) --begin;
  return to_lower(s.substr(begin, end - begin));
}

void split_line(std::string_view line, const SplitOptions& options,
                std::vector<std::string>& out) {
  std::size_t start = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (!is_terminal(line[i])) continue;
    const bool at_boundary = i + 1 == line.size() || is_space(line[i + 1]);
    if (!at_boundary) continue;
    if (!options.abbreviations.empty() && line[i] == '.' &&
        options.abbreviations.contains(last_word(line, i))) {
      continue;
    }
    auto sentence = trim(line.substr(start, i + 1 - start));
    if (!sentence.empty()) out.emplace_back(sentence);
    start = i + 1;
  }
  auto rest = trim(line.substr(start));
  if (!rest.empty()) out.emplace_back(rest);
}

}  // namespace

std::vector<std::string> split_sentences(std::string_view text,
                                         const SplitOptions& options) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find_first_of("\r\n", start);
    if (end == std::string_view::npos) end = text.size();
    split_line(text.substr(start, end - start), options, out);
    start = end + 1;
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  for (char c : text) {
    if (is_space(c)) {
      flush();
    } else if (is_ascii_punct(c)) {
      flush();
      tokens.emplace_back(1, c);
    } else {
      current.push_back(static_cast<char>(
          std::tolower(static_cast<unsigned char>(c))));
    }
  }
  flush();
  return tokens;
}

std::string to_lower(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (static_cast<unsigned char>(c) < 0x80) {
      c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
  }
  return out;
}

std::string normalize_spacing(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return to_lower(out);
}

std::vector<std::string> utf8_units(std::string_view text) {
  std::vector<std::string> units;
  units.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const auto lead = static_cast<unsigned char>(text[i]);
    std::size_t len = 1;
    if (lead >= 0xF0 && lead < 0xF8) {
      len = 4;
    } else if (lead >= 0xE0) {
      len = lead < 0xF0 ? 3 : 1;
    } else if (lead >= 0xC0) {
      len = 2;
    }
    if (i + len > text.size()) len = 1;
    for (std::size_t k = 1; k < len; ++k) {
      if ((static_cast<unsigned char>(text[i + k]) & 0xC0) != 0x80) {
        len = 1;
        break;
      }
    }
    units.emplace_back(text.substr(i, len));
    i += len;
  }
  return units;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.append(sep);
    out.append(parts[i]);
  }
  return out;
}

}  // namespace avtk
