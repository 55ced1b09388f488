#pragma once

#include <functional>
#include <string>
#include <vector>

namespace avtk::diag {

using WarningSink = std::function<void(const std::string&)>;

/// Emits a non-fatal warning. The default sink writes to stderr.
void warn(const std::string& message);

/// Installs a new sink and returns the previous one. Thread-safe.
WarningSink set_warning_sink(WarningSink sink);

/// Restores the previous sink when destroyed; collects warnings meanwhile.
class CaptureWarnings {
 public:
  CaptureWarnings();
  ~CaptureWarnings();
  CaptureWarnings(const CaptureWarnings&) = delete;
  CaptureWarnings& operator=(const CaptureWarnings&) = delete;

  const std::vector<std::string>& messages() const { return messages_; }
  std::size_t count() const { return messages_.size(); }

 private:
  std::vector<std::string> messages_;
  WarningSink previous_;
};

}  // namespace avtk::diag
