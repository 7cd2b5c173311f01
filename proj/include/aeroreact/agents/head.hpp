#pragma once

#include "aeroreact/agents/history.hpp"
#include "aeroreact/agents/worker.hpp"
#include "aeroreact/llm/backend.hpp"
#include "aeroreact/tools/toolbelt.hpp"

#include <map>
#include <optional>
#include <string>

namespace aeroreact::agents {

/// Result of the planning call. `plan` is empty on head-agent failure, with
/// `failure` saying why (unusable output, drone ids outside the fleet).
struct PlanOutcome {
  std::optional<HeadPlan> plan;
  std::string failure;
  std::string raw_text;

  bool ok() const { return plan.has_value(); }
  Json to_json() const;
  static PlanOutcome from_json(const Json& j);
};

/// Everything one user request produced.
struct RunResult {
  std::string run_label;
  std::string user_input;
  tools::Method method = tools::Method::reacteval;
  PlanOutcome plan;
  std::map<int, ThreadHistory> threads;  // dispatched drones only
  std::string response;
  bool response_fallback = false;
  Json final_fleet;

  Json to_json() const;
  static RunResult from_json(const Json& j);
};

std::string head_thread(const std::string& run_label);
std::string worker_thread(const std::string& run_label, int drone_id);

/// Plans a request across the fleet, runs one worker per actionable drone in
/// ascending id order, then composes the user response.
class HeadAgent {
 public:
  HeadAgent(llm::Backend& backend, tools::World& world, AgentOptions options = {},
            AgentObserver* observer = nullptr);

  PlanOutcome plan(const std::string& user_input, const std::string& run_label);

  RunResult execute(const std::string& user_input, tools::Method method, const std::string& run_label);

  /// Single completion over the request, plans and thread results. Falls back
  /// to a templated summary when the backend fails; never empty.
  std::string respond(const std::string& user_input, const PlanOutcome& plan,
                      const std::map<int, ThreadHistory>& results, const std::string& run_label,
                      bool* used_fallback = nullptr);

  const SessionHistory& session() const { return session_; }
  SessionHistory& session() { return session_; }
  void set_observer(AgentObserver* observer) { observer_ = observer; }

 private:
  llm::Backend& backend_;
  tools::World& world_;
  AgentOptions options_;
  AgentObserver* observer_;
  SessionHistory session_;
};

/// Plain-text summary used when the respond completion fails.
std::string fallback_response(const std::string& user_input, const PlanOutcome& plan,
                              const std::map<int, ThreadHistory>& results, const std::string& reason);

}  // namespace aeroreact::agents
