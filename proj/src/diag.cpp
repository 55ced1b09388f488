#include "avtk/diag.hpp"

#include <iostream>
#include <mutex>

namespace avtk::diag {
namespace {

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

WarningSink& current_sink() {
  static WarningSink sink = [](const std::string& msg) {
    std::cerr << "warning: " << msg << '\n';
  };
  return sink;
}

}  // namespace

void warn(const std::string& message) {
  std::lock_guard lock(sink_mutex());
  if (current_sink()) current_sink()(message);
}

WarningSink set_warning_sink(WarningSink sink) {
  std::lock_guard lock(sink_mutex());
  std::swap(sink, current_sink());
  return sink;
}

CaptureWarnings::CaptureWarnings() {
  previous_ = set_warning_sink(
      [this](const std::string& msg) { messages_.push_back(msg); });
}

CaptureWarnings::~CaptureWarnings() { set_warning_sink(std::move(previous_)); }

}  // namespace avtk::diag
