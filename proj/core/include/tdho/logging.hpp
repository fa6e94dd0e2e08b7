#pragma once

#include <string>

namespace tdho::log {

enum class Level { off = 0, info = 1, debug = 2 };

/// Current verbosity, read once from the TDHO_LOG environment variable
/// ("info" or "debug"; anything else means off).
Level level();

void info(const std::string& msg);
void debug(const std::string& msg);

}  // namespace tdho::log
