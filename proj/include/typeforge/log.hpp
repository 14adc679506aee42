#pragma once
// Minimal leveled logger. One line per event on stderr:
//   <iso8601> <level> <message>
// Callers append key=value pairs to the message themselves.

#include <string_view>

namespace typeforge::logging {

enum class Level { debug = 0, info = 1, warn = 2, error = 3 };

void set_level(Level level);
Level level();
bool set_level_by_name(std::string_view name);

void write(Level level, std::string_view msg);

inline void debug(std::string_view msg) { write(Level::debug, msg); }
inline void info(std::string_view msg) { write(Level::info, msg); }
inline void warn(std::string_view msg) { write(Level::warn, msg); }
inline void error(std::string_view msg) { write(Level::error, msg); }

}  // namespace typeforge::logging
