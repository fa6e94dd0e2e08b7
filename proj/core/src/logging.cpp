#include "tdho/logging.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace tdho::log {

Level level() {
  static Level lv = [] {
    const char* env = std::getenv("TDHO_LOG");
    if (env == nullptr) return Level::off;
    if (std::strcmp(env, "debug") == 0) return Level::debug;
    if (std::strcmp(env, "info") == 0) return Level::info;
    return Level::off;
  }();
  return lv;
}

void info(const std::string& msg) {
  if (level() >= Level::info) std::fprintf(stderr, "[tdho] %s\n", msg.c_str());
}

void debug(const std::string& msg) {
  if (level() >= Level::debug) std::fprintf(stderr, "[tdho:debug] %s\n", msg.c_str());
}

}  // namespace tdho::log
