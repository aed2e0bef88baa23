#pragma once

#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>

// Minimal stderr logger controlled by the PELAGIC_LOG environment variable
// (error|info|debug). Defaults to "error".

namespace pelagic::log {

enum class Level { error = 0, info = 1, debug = 2 };

inline Level threshold() {
    static const Level lvl = [] {
        const char* env = std::getenv("PELAGIC_LOG");
        if (env == nullptr) return Level::error;
        if (std::strcmp(env, "debug") == 0) return Level::debug;
        if (std::strcmp(env, "info") == 0) return Level::info;
        return Level::error;
    }();
    return lvl;
}

inline void emit(Level lvl, const char* tag, const char* fmt, va_list args) {
    if (lvl > threshold()) return;
    std::fprintf(stderr, "[%s] ", tag);
    std::vfprintf(stderr, fmt, args);
    std::fputc('\n', stderr);
}

inline void error(const char* fmt, ...) {
    va_list args;
    va_start(args, fmt);
    emit(Level::error, "error", fmt, args);
    va_end(args);
}

inline void info(const char* fmt, ...) {
    va_list args;
    va_start(args, fmt);
    emit(Level::info, "info", fmt, args);
    va_end(args);
}

inline void debug(const char* fmt, ...) {
    va_list args;
    va_start(args, fmt);
    emit(Level::debug, "debug", fmt, args);
    va_end(args);
}

} // namespace pelagic::log
