#pragma once

#include "aeroreact/agents/head.hpp"
#include "aeroreact/eval/suite.hpp"

#include <map>
#include <optional>
#include <string_view>
#include <vector>

namespace aeroreact::eval {

enum class FailureMode { incorrect_function_calls, early_stopping, head_agent_failure };

std::string_view to_string(FailureMode mode);
std::optional<FailureMode> parse_failure_mode(std::string_view name);

/// Executed actions per drone in call order, `terminate` excluded.
using ExecutedActions = std::map<int, std::vector<agents::ActionRecord>>;

ExecutedActions executed_actions(const agents::RunResult& run);

/// Matched-prefix length of one drone's executed actions against its expected
/// sequence. A failed or non-matching call freezes the count.
int score_drone(const std::vector<agents::ActionRecord>& executed, const std::vector<ExpectedAction>& expected);

struct SequentialScore {
  int points = 0;
  std::map<int, int> per_drone;
};

SequentialScore score_sequential(const ExecutedActions& executed,
                                 const std::map<int, std::vector<ExpectedAction>>& expected);

bool predicate_satisfied(const Predicate& p, const agents::RunResult& run);

/// One entry per predicate, in suite order.
std::vector<bool> score_subtasks(const agents::RunResult& run, const std::vector<Predicate>& predicates);

std::optional<FailureMode> classify_failure(const agents::RunResult& run, const TaskSpec& task, int points);

struct TaskScore {
  std::string task_id;
  Complexity complexity = Complexity::easy;
  int points = 0;
  int max_points = 0;
  double elapsed = 0.0;
  std::optional<FailureMode> failure;
  std::map<int, int> per_drone;   // easy/medium
  std::vector<bool> subtasks;     // hard

  Json to_json() const;
  static TaskScore from_json(const Json& j);
};

TaskScore score_task(const TaskSpec& task, const agents::RunResult& run, double elapsed);

}  // namespace aeroreact::eval
