// Tiny stderr logger controlled by NNEQUIV_LOG_LEVEL (error|info|debug).

#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace nnequiv::logging {

enum class Level { Error = 0, Info = 1, Debug = 2 };

inline Level threshold() {
  static const Level level = [] {
    const char* env = std::getenv("NNEQUIV_LOG_LEVEL");
    if (!env) return Level::Error;
    if (std::strcmp(env, "debug") == 0) return Level::Debug;
    if (std::strcmp(env, "info") == 0) return Level::Info;
    return Level::Error;
  }();
  return level;
}

inline bool enabled(Level l) { return static_cast<int>(l) <= static_cast<int>(threshold()); }

}  // namespace nnequiv::logging

#define NNEQUIV_LOG(level, ...)                                              \
  do {                                                                       \
    if (::nnequiv::logging::enabled(::nnequiv::logging::Level::level)) {     \
      std::fprintf(stderr, "[nnequiv] " __VA_ARGS__);                        \
      std::fprintf(stderr, "\n");                                            \
    }                                                                        \
  } while (0)
