#include "qms/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace qms {
namespace {

std::mutex sink_mutex;
LogSink current_sink;
std::atomic<LogLevel> current_level{LogLevel::Warning};

const char* level_name(LogLevel level) {
  switch (level) {
    case LogLevel::Debug: return "debug";
    case LogLevel::Info: return "info";
    case LogLevel::Warning: return "warning";
    case LogLevel::Error: return "error";
    case LogLevel::Off: break;
  }
  return "off";
}

}  // namespace

void set_log_sink(LogSink sink) {
  std::lock_guard lock(sink_mutex);
  current_sink = std::move(sink);
}

void set_log_level(LogLevel level) { current_level.store(level); }

LogLevel log_level() { return current_level.load(); }

void log(LogLevel level, std::string_view message) {
  if (level < current_level.load() || level == LogLevel::Off) return;
  std::lock_guard lock(sink_mutex);
  if (current_sink) {
    current_sink(level, message);
    return;
  }
  std::cerr << "qms " << level_name(level) << ": " << message << '\n';
}

}  // namespace qms
