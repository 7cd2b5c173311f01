#pragma once

#include "aeroreact/json.hpp"
#include "aeroreact/sim/drone.hpp"
#include "aeroreact/tools/toolbelt.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace aeroreact::agents {

/// One drone's assignment from the head agent.
struct DroneTask {
  std::string plan;
  std::string expected_outcome;
  bool end_flag = false;  // true: informational, no worker dispatched
};

struct HeadPlan {
  std::map<int, DroneTask> per_drone;
  std::string response_to_user;

  /// From a record already validated against the plan schema.
  static HeadPlan from_parsed(const Json& parsed);
  Json to_json() const;
};

/// A tool call as executed, with the drone's state right after it.
struct ActionRecord {
  tools::ToolCall call;
  tools::ToolResult result;
  sim::DroneState state_after;

  Json to_json() const;
  static ActionRecord from_json(const Json& j, int drone_id);
};

struct Step {
  std::optional<Json> reasoning;
  std::optional<ActionRecord> action;
  std::optional<Json> evaluation;
};

/// Worker-scoped memory for one thread. Starts empty for every task.
struct ThreadHistory {
  int drone_id = 1;
  DroneTask task;
  std::vector<Step> steps;
  int iteration = 0;
  bool complete = false;
  std::optional<std::string> abort_reason;

  bool aborted() const { return abort_reason.has_value(); }
  std::vector<const ActionRecord*> actions() const;

  /// One line per step ({step, reasoning?, action?, evaluation?}) and a
  /// trailer line {complete, iterations[, abort]}.
  std::string to_jsonl() const;
  static ThreadHistory from_jsonl(const std::string& text, int drone_id);

  /// Compact text of prior steps for the reasoning/evaluation prompts.
  std::string render_for_prompt() const;
};

struct DroneOutcome {
  int drone_id = 1;
  bool complete = false;
  int iterations = 0;
  std::vector<std::string> actions;  // "move(direction=forward, distance=4): ok"
  std::optional<std::string> abort_reason;

  Json to_json() const;
  static DroneOutcome from_json(const Json& j);
  static DroneOutcome summarize(const ThreadHistory& thread);
};

struct SessionEntry {
  std::string user_input;
  Json head_plan;  // plan record, or {"failure": "..."}
  std::vector<DroneOutcome> outcomes;
  std::string response;

  Json to_json() const;
  static SessionEntry from_json(const Json& j);
};

/// Head-scoped memory across every task of a session; append-only.
class SessionHistory {
 public:
  void append(SessionEntry entry) { entries_.push_back(std::move(entry)); }
  const std::vector<SessionEntry>& entries() const { return entries_; }
  size_t size() const { return entries_.size(); }
  std::string render_for_prompt() const;

 private:
  std::vector<SessionEntry> entries_;
};

/// "move(direction=forward, distance=4)"
std::string describe_call(const tools::ToolCall& call);

}  // namespace aeroreact::agents
