#pragma once

#include <string_view>

namespace sciret {

enum class LogLevel { quiet = 0, warning = 1, info = 2 };

void set_log_level(LogLevel level);
LogLevel log_level();

/// Both write one line to standard error when the level allows it.
void log_warning(std::string_view msg);
void log_info(std::string_view msg);

}  // namespace sciret
