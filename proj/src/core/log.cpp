#include "orgym/core/log.hpp"

#include <cstdlib>
#include <iostream>

namespace orgym {

LogLevel log_level_from_env(LogLevel fallback) {
  const char* env = std::getenv("ORG_LOG");
  if (env == nullptr) return fallback;
  std::string_view v(env);
  if (v == "debug") return LogLevel::Debug;
  if (v == "info") return LogLevel::Info;
  if (v == "warn") return LogLevel::Warn;
  return fallback;
}

EventLog::EventLog(std::string tag, LogLevel level) : tag_(std::move(tag)), level_(level) {}

void EventLog::add_sink(std::ostream* sink) {
  std::lock_guard lock(mu_);
  sinks_.push_back(sink);
}

void EventLog::event(LogLevel level, std::string_view name, std::string_view fields) {
  std::string line = fields.empty() ? fmt::format("{}:{}\n", tag_, name)
                                    : fmt::format("{}:{} {}\n", tag_, name, fields);
  std::lock_guard lock(mu_);
  // File sinks get every line; stderr honours the configured level.
  for (auto* s : sinks_) {
    *s << line;
    s->flush();
  }
  if (level >= level_) std::cerr << line;
}

}  // namespace orgym
