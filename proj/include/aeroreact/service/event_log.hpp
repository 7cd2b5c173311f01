#pragma once

#include "aeroreact/json.hpp"

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace aeroreact::service {

enum class EventKind { user_input, head_plan, reason, action, evaluation, state_update, response, error };

std::string_view to_string(EventKind kind);
std::optional<EventKind> parse_event_kind(std::string_view name);

struct SessionEvent {
  std::int64_t sequence = 0;
  EventKind kind = EventKind::user_input;
  std::string run;
  Json payload = Json::object();
  std::string timestamp;  // UTC, ISO 8601

  Json to_json() const;
  static SessionEvent from_json(const Json& j);
  /// "id: N\nevent: kind\ndata: {...}\n\n"
  std::string to_sse() const;
};

struct LoadedEvents {
  std::vector<SessionEvent> events;
  std::optional<std::string> warning;  // set when a corrupt line stopped the load
};

/// Append-only, gap-free event sequence (starting at 1), optionally mirrored
/// to a JSONL file. Readers may block for new events.
class EventLog {
 public:
  explicit EventLog(std::filesystem::path file = {});
  EventLog(std::filesystem::path file, std::vector<SessionEvent> restored);

  SessionEvent append(EventKind kind, const std::string& run, Json payload);

  /// Events with sequence >= from.
  std::vector<SessionEvent> since(std::int64_t from) const;
  /// Like since(), but waits up to `timeout` when nothing is available yet.
  std::vector<SessionEvent> wait_since(std::int64_t from, std::chrono::milliseconds timeout) const;

  std::int64_t last_sequence() const;
  /// Wakes all waiters; later waits return immediately.
  void close();
  bool closed() const;

  static LoadedEvents load(const std::filesystem::path& file);

 private:
  mutable std::mutex mu_;
  mutable std::condition_variable cv_;
  std::vector<SessionEvent> events_;
  std::filesystem::path file_;
  std::ofstream out_;
  bool closed_ = false;
};

}  // namespace aeroreact::service
