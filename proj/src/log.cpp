#include "sciret/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace sciret {
namespace {

std::atomic<LogLevel> g_level{LogLevel::warning};
std::mutex g_mutex;

void emit(std::string_view tag, std::string_view msg) {
  std::lock_guard lock(g_mutex);
  std::cerr << tag << msg << '\n';
}

}  // namespace

void set_log_level(LogLevel level) { g_level = level; }
LogLevel log_level() { return g_level; }

void log_warning(std::string_view msg) {
  if (g_level >= LogLevel::warning) emit("warning: ", msg);
}

void log_info(std::string_view msg) {
  if (g_level >= LogLevel::info) emit("", msg);
}

}  // namespace sciret
