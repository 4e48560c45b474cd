#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace toxblend::log {

enum class Level { Info, Warning };

using Sink = std::function<void(Level, std::string_view)>;

/// Replaces the process-wide sink (default: stderr). Returns the previous one.
Sink set_sink(Sink sink);

void info(std::string_view message);
void warn(std::string_view message);

/// Captures warnings for the lifetime of the object (tests, batch reports).
class WarningCapture {
 public:
  WarningCapture();
  ~WarningCapture();
  WarningCapture(const WarningCapture&) = delete;
  WarningCapture& operator=(const WarningCapture&) = delete;

  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  Sink previous_;
  std::vector<std::string> warnings_;
};

}  // namespace toxblend::log
