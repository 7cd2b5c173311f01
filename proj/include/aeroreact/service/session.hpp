#pragma once

#include "aeroreact/agents/head.hpp"
#include "aeroreact/service/config.hpp"
#include "aeroreact/service/event_log.hpp"
#include "aeroreact/tools/scene.hpp"
#include "aeroreact/tools/vision.hpp"

#include <condition_variable>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace aeroreact::service {

class SessionNotFound : public std::runtime_error {
 public:
  explicit SessionNotFound(const std::string& id) : std::runtime_error("session not found: " + id) {}
};

class SessionBusy : public std::runtime_error {
 public:
  explicit SessionBusy(const std::string& id) : std::runtime_error("session " + id + " is busy with another run") {}
};

/// One fleet, one head agent, one event log. Runs execute one at a time.
/// Files under `dir`: config.json, events.jsonl, runs/<run>.json.
class Session {
 public:
  Session(std::string id, SessionConfig config, std::filesystem::path dir);
  ~Session();
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  /// Rebuilds fleet state and head history by replaying the event log.
  static std::unique_ptr<Session> restore(std::string id, std::filesystem::path dir,
                                          std::vector<std::string>* warnings = nullptr);

  const std::string& id() const { return id_; }
  const SessionConfig& config() const { return config_; }

  /// Starts a run on a background thread and returns its id ("run-<k>").
  /// Throws SessionBusy while another run is active.
  std::string submit(const std::string& text);
  /// Runs on the calling thread.
  std::string run(const std::string& text);
  bool busy() const;
  void wait_idle();

  /// Latest fleet snapshot, canonical JSON shape.
  Json fleet() const;
  size_t history_size() const;
  std::vector<agents::SessionEntry> history() const;
  EventLog& events() { return *events_; }
  const EventLog& events() const { return *events_; }
  /// Stored run record, if the run exists.
  std::optional<Json> transcript(const std::string& run_id) const;

  Json summary() const;

 private:
  struct Restored {};
  Session(std::string id, SessionConfig config, std::filesystem::path dir, std::vector<SessionEvent> events,
          Restored);

  std::string begin_run(const std::string& text);
  void execute(const std::string& run_id, const std::string& text);
  class Recorder;

  std::string id_;
  SessionConfig config_;
  std::filesystem::path dir_;

  mutable std::mutex mu_;
  std::condition_variable idle_cv_;
  bool busy_ = false;
  int runs_ = 0;
  Json fleet_snapshot_;
  std::vector<agents::SessionEntry> history_;  // copy readable while a run is active
  std::thread runner_;

  tools::Scene scene_;
  std::unique_ptr<llm::Backend> backend_;
  std::unique_ptr<tools::ScriptedVision> vision_;
  std::unique_ptr<sim::Fleet> fleet_;
  tools::CaptureLog captures_;
  std::unique_ptr<tools::World> world_;
  std::unique_ptr<agents::HeadAgent> head_;
  std::unique_ptr<EventLog> events_;
};

/// Registry of live sessions rooted at <data_dir>/sessions.
class SessionManager {
 public:
  SessionManager(std::filesystem::path data_dir, SessionConfig defaults);

  /// Throws ConfigError.
  std::string create(const SessionConfig& config);
  /// Body fields override the service defaults.
  std::string create_from_json(const Json& body);

  /// Throws SessionNotFound. Sessions persisted on disk but not yet loaded
  /// are restored on first access.
  std::shared_ptr<Session> get(const std::string& id);
  std::vector<std::string> ids() const;
  const SessionConfig& defaults() const { return defaults_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  std::filesystem::path root_;
  SessionConfig defaults_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::vector<std::string> warnings_;
  int counter_ = 0;
};

}  // namespace aeroreact::service
