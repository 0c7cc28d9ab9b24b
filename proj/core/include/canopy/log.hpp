#pragma once

#include <string_view>

namespace canopy::log {

enum class Level { debug, info, warn, error };

void set_min_level(Level level);

/// Writes one `level=<lvl> msg="<text>"` line to standard error.
void write(Level level, std::string_view msg);

inline void debug(std::string_view msg) { write(Level::debug, msg); }
inline void info(std::string_view msg) { write(Level::info, msg); }
inline void warn(std::string_view msg) { write(Level::warn, msg); }
inline void error(std::string_view msg) { write(Level::error, msg); }

}  // namespace canopy::log
