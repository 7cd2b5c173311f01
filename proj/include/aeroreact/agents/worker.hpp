#pragma once

#include "aeroreact/agents/history.hpp"
#include "aeroreact/llm/backend.hpp"
#include "aeroreact/tools/toolbelt.hpp"

#include <optional>
#include <string>

namespace aeroreact::agents {

struct AgentOptions {
  int max_iters = 20;
  int max_retries = 1;
};

struct PlanOutcome;

/// Hooks for streaming agent progress. All methods default to no-ops.
class AgentObserver {
 public:
  virtual ~AgentObserver() = default;
  virtual void on_head_plan(const PlanOutcome&) {}
  virtual void on_reason(int /*drone_id*/, const Json& /*reasoning*/) {}
  virtual void on_action(int /*drone_id*/, const ActionRecord&) {}
  virtual void on_evaluation(int /*drone_id*/, const Json& /*evaluation*/) {}
  virtual void on_error(std::optional<int> /*drone_id*/, const std::string& /*message*/) {}
  virtual void on_response(const std::string&) {}
};

/// Drives one drone through a task with one of the three reasoning loops.
/// Tool failures are recorded and the loop continues; a backend that cannot
/// produce usable output aborts the thread.
class Worker {
 public:
  Worker(llm::Backend& backend, tools::World& world, AgentOptions options = {},
         AgentObserver* observer = nullptr);

  /// Reason -> Act -> Evaluate until the evaluation's end_flag or max_iters.
  ThreadHistory react_eval(const DroneTask& task, int drone_id, const std::string& thread);

  /// Reason (with end_flag) -> Act; a true end_flag ends the loop before acting.
  ThreadHistory react(const DroneTask& task, int drone_id, const std::string& thread);

  /// Direct function calls until the terminate tool or max_iters.
  ThreadHistory act(const DroneTask& task, int drone_id, const std::string& thread);

  ThreadHistory run(tools::Method method, const DroneTask& task, int drone_id, const std::string& thread);

 private:
  llm::StructuredOutput ask(const std::string& thread, llm::TemplateId id, const llm::PromptContext& context);
  ActionRecord execute(tools::Method method, int drone_id, const Json& function_call);
  std::string drone_state_text(int drone_id) const;

  llm::Backend& backend_;
  tools::World& world_;
  AgentOptions options_;
  AgentObserver* observer_;
};

/// Prompt text for the tool list of `method`.
std::string tools_text(tools::Method method);

}  // namespace aeroreact::agents
