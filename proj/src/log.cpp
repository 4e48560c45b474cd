#include "toxblend/log.hpp"

#include <iostream>
#include <mutex>
#include <vector>

namespace toxblend::log {
namespace {

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

Sink& current_sink() {
  static Sink sink = [](Level level, std::string_view msg) {
    std::cerr << (level == Level::Warning ? "[warn] " : "[info] ") << msg << '\n';
  };
  return sink;
}

void emit(Level level, std::string_view message) {
  std::lock_guard lock(sink_mutex());
  if (current_sink()) current_sink()(level, message);
}

}  // namespace

Sink set_sink(Sink sink) {
  std::lock_guard lock(sink_mutex());
  Sink previous = std::move(current_sink());
  current_sink() = std::move(sink);
  return previous;
}

void info(std::string_view message) { emit(Level::Info, message); }
void warn(std::string_view message) { emit(Level::Warning, message); }

WarningCapture::WarningCapture() {
  previous_ = set_sink([this](Level level, std::string_view msg) {
    if (level == Level::Warning) warnings_.emplace_back(msg);
  });
}

WarningCapture::~WarningCapture() { set_sink(std::move(previous_)); }

}  // namespace toxblend::log
