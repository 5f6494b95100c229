#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

namespace rpl {

enum class LogLevel { quiet = 0, error = 1, warn = 2, info = 3, debug = 4 };

// Verbosity from the RPL_LOG environment variable; defaults to warn.
inline LogLevel log_level() {
    static const LogLevel level = [] {
        const char* env = std::getenv("RPL_LOG");
        if (env == nullptr) return LogLevel::warn;
        if (std::strcmp(env, "quiet") == 0) return LogLevel::quiet;
        if (std::strcmp(env, "error") == 0) return LogLevel::error;
        if (std::strcmp(env, "warn") == 0) return LogLevel::warn;
        if (std::strcmp(env, "info") == 0) return LogLevel::info;
        if (std::strcmp(env, "debug") == 0) return LogLevel::debug;
        return LogLevel::warn;
    }();
    return level;
}

inline void log_line(LogLevel level, const std::string& message) {
    if (static_cast<int>(level) <= static_cast<int>(log_level()))
        std::fprintf(stderr, "%s\n", message.c_str());
}

} // namespace rpl
