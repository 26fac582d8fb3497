#pragma once

// Minimal process-wide diagnostic sink. Library code reports drops and
// warnings here; the CLI routes them to stderr, tests usually silence them.

#include <functional>
#include <iostream>
#include <mutex>
#include <string>
#include <string_view>

namespace wordmotion::log {

enum class Level { Debug = 0, Info = 1, Warn = 2 };

using Sink = std::function<void(Level, std::string_view)>;

namespace detail {
struct State {
  std::mutex mutex;
  Level threshold = Level::Warn;
  Sink sink = [](Level level, std::string_view msg) {
    std::cerr << (level == Level::Warn ? "warning: " : "") << msg << '\n';
  };
};

inline State& state() {
  static State s;
  return s;
}
}  // namespace detail

inline void set_sink(Sink sink) {
  std::lock_guard lock(detail::state().mutex);
  detail::state().sink = std::move(sink);
}

inline void set_level(Level level) {
  std::lock_guard lock(detail::state().mutex);
  detail::state().threshold = level;
}

inline void silence() {
  set_sink([](Level, std::string_view) {});
}

inline void emit(Level level, std::string_view msg) {
  auto& s = detail::state();
  std::lock_guard lock(s.mutex);
  if (level < s.threshold || !s.sink) return;
  s.sink(level, msg);
}

inline void debug(const std::string& msg) { emit(Level::Debug, msg); }
inline void info(const std::string& msg) { emit(Level::Info, msg); }
inline void warn(const std::string& msg) { emit(Level::Warn, msg); }

}  // namespace wordmotion::log
