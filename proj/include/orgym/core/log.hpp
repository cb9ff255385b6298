#pragma once

#include <memory>
#include <mutex>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

namespace orgym {

enum class LogLevel { Debug = 0, Info = 1, Warn = 2 };

/// Level named by the ORG_LOG environment variable (debug|info|warn);
/// `fallback` when unset or unrecognized.
LogLevel log_level_from_env(LogLevel fallback = LogLevel::Warn);

/// Line-oriented, thread-safe log sink. Each component prefixes its lines
/// with a tag, e.g. `RIC:node_connected node=gnb:311-048-01000501`.
class EventLog {
 public:
  explicit EventLog(std::string tag, LogLevel level = log_level_from_env());

  /// Also write every line, regardless of level, to `sink` (not owned).
  void add_sink(std::ostream* sink);
  void set_level(LogLevel level) { level_ = level; }

  void event(LogLevel level, std::string_view name, std::string_view fields = {});

  template <typename... Args>
  void info(std::string_view name, fmt::format_string<Args...> f, Args&&... args) {
    event(LogLevel::Info, name, fmt::format(f, std::forward<Args>(args)...));
  }
  template <typename... Args>
  void warn(std::string_view name, fmt::format_string<Args...> f, Args&&... args) {
    event(LogLevel::Warn, name, fmt::format(f, std::forward<Args>(args)...));
  }
  template <typename... Args>
  void debug(std::string_view name, fmt::format_string<Args...> f, Args&&... args) {
    if (level_ > LogLevel::Debug) return;
    event(LogLevel::Debug, name, fmt::format(f, std::forward<Args>(args)...));
  }

 private:
  std::string tag_;
  LogLevel level_;
  std::mutex mu_;
  std::vector<std::ostream*> sinks_;
};

}  // namespace orgym
