#include "aeroreact/service/event_log.hpp"

#include <array>
#include <ctime>
#include <stdexcept>

namespace aeroreact::service {

namespace {

constexpr std::array<std::string_view, 8> kKindNames = {"user_input", "head_plan",    "reason",   "action",
                                                        "evaluation", "state_update", "response", "error"};

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[40];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[48];
  std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms));
  return out;
}

}  // namespace

std::string_view to_string(EventKind kind) { return kKindNames[static_cast<size_t>(kind)]; }

std::optional<EventKind> parse_event_kind(std::string_view name) {
  for (size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == name) return static_cast<EventKind>(i);
  }
  return std::nullopt;
}

Json SessionEvent::to_json() const {
  return {{"sequence", sequence}, {"kind", to_string(kind)}, {"run", run}, {"timestamp", timestamp},
          {"payload", payload}};
}

SessionEvent SessionEvent::from_json(const Json& j) {
  SessionEvent e;
  e.sequence = j.at("sequence").get<std::int64_t>();
  const auto kind = parse_event_kind(j.at("kind").get<std::string>());
  if (!kind) throw std::invalid_argument("unknown event kind");
  e.kind = *kind;
  e.run = j.value("run", "");
  e.timestamp = j.value("timestamp", "");
  e.payload = j.at("payload");
  return e;
}

std::string SessionEvent::to_sse() const {
  return "id: " + std::to_string(sequence) + "\nevent: " + std::string(to_string(kind)) +
         "\ndata: " + to_json().dump() + "\n\n";
}

EventLog::EventLog(std::filesystem::path file) : EventLog(std::move(file), {}) {}

EventLog::EventLog(std::filesystem::path file, std::vector<SessionEvent> restored)
    : events_(std::move(restored)), file_(std::move(file)) {
  if (!file_.empty()) {
    // Rewritten from the restored prefix so a corrupt tail never precedes new events.
    out_.open(file_, std::ios::trunc);
    if (!out_) throw std::runtime_error("cannot open event log " + file_.string());
    for (const auto& e : events_) out_ << e.to_json().dump() << '\n';
    out_.flush();
  }
}

SessionEvent EventLog::append(EventKind kind, const std::string& run, Json payload) {
  SessionEvent e;
  {
    std::lock_guard lock(mu_);
    e.sequence = events_.empty() ? 1 : events_.back().sequence + 1;
    e.kind = kind;
    e.run = run;
    e.payload = std::move(payload);
    e.timestamp = utc_now();
    if (out_.is_open()) {
      out_ << e.to_json().dump() << '\n';
      out_.flush();
    }
    events_.push_back(e);
  }
  cv_.notify_all();
  return e;
}

std::vector<SessionEvent> EventLog::since(std::int64_t from) const {
  std::lock_guard lock(mu_);
  std::vector<SessionEvent> out;
  for (const auto& e : events_) {
    if (e.sequence >= from) out.push_back(e);
  }
  return out;
}

std::vector<SessionEvent> EventLog::wait_since(std::int64_t from, std::chrono::milliseconds timeout) const {
  std::unique_lock lock(mu_);
  cv_.wait_for(lock, timeout, [&] { return closed_ || (!events_.empty() && events_.back().sequence >= from); });
  std::vector<SessionEvent> out;
  for (const auto& e : events_) {
    if (e.sequence >= from) out.push_back(e);
  }
  return out;
}

std::int64_t EventLog::last_sequence() const {
  std::lock_guard lock(mu_);
  return events_.empty() ? 0 : events_.back().sequence;
}

void EventLog::close() {
  {
    std::lock_guard lock(mu_);
    closed_ = true;
  }
  cv_.notify_all();
}

bool EventLog::closed() const {
  std::lock_guard lock(mu_);
  return closed_;
}

LoadedEvents EventLog::load(const std::filesystem::path& file) {
  LoadedEvents loaded;
  std::ifstream in(file);
  if (!in) return loaded;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const Json j = Json::parse(line, nullptr, false);
    std::optional<SessionEvent> e;
    if (!j.is_discarded() && j.is_object()) {
      try {
        e = SessionEvent::from_json(j);
      } catch (const std::exception&) {
      }
    }
    const std::int64_t expected = loaded.events.empty() ? 1 : loaded.events.back().sequence + 1;
    if (!e || e->sequence != expected) {
      loaded.warning = file.string() + ": stopped at line " + std::to_string(line_no) +
                       " (corrupt or out-of-sequence event); restored " + std::to_string(loaded.events.size()) +
                       " event(s)";
      break;
    }
    loaded.events.push_back(std::move(*e));
  }
  return loaded;
}

}  // namespace aeroreact::service
