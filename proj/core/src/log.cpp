#include "canopy/log.hpp"

#include <atomic>
#include <cstdio>
#include <mutex>
#include <string>

namespace canopy::log {

namespace {

std::atomic<int> g_min_level{static_cast<int>(Level::info)};
std::mutex g_mutex;

const char* level_name(Level level) {
  switch (level) {
    case Level::debug: return "debug";
    case Level::info: return "info";
    case Level::warn: return "warn";
    case Level::error: return "error";
  }
  return "info";
}

}  // namespace

void set_min_level(Level level) { g_min_level = static_cast<int>(level); }

void write(Level level, std::string_view msg) {
  if (static_cast<int>(level) < g_min_level) return;
  std::string escaped;
  escaped.reserve(msg.size());
  for (char c : msg) {
    if (c == '"' || c == '\\') escaped.push_back('\\');
    if (c == '\n') {
      escaped += "\\n";
      continue;
    }
    escaped.push_back(c);
  }
  std::lock_guard lock(g_mutex);
  std::fprintf(stderr, "level=%s msg=\"%s\"\n", level_name(level), escaped.c_str());
}

}  // namespace canopy::log
