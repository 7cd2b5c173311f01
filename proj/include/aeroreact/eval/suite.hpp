#pragma once

#include "aeroreact/agents/history.hpp"
#include "aeroreact/json.hpp"
#include "aeroreact/sim/drone.hpp"

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace aeroreact::eval {

enum class Complexity { easy, medium, hard };

std::string_view to_string(Complexity c);
std::optional<Complexity> parse_complexity(std::string_view name);

/// One required function call. Parameter matchers are exact values (numbers
/// within 1e-6), "*" for any value, or {"abs": v} for sign-free angles.
struct ExpectedAction {
  std::string tool;
  Json params = Json::object();
  int drone_id = 1;

  bool matches(const tools::ToolCall& call) const;
  Json to_json() const;
};

/// Machine-checkable subtask for hard tasks. `type` is one of:
///   action_succeeded   {tool}
///   reached            {point:[x,y,z], tolerance}
///   captured_near      {point:[x,y] or [x,y,z], tolerance, facing}
///   captured_from_side {point:[x,y(,z)], side: "left"|"right"}
///   analyzed           {image}
///   response_mentions  {text}
/// `drone`, when set, restricts the check to that drone's actions.
struct Predicate {
  std::string type;
  std::optional<int> drone;
  Json spec = Json::object();
  std::string description;

  Json to_json() const;
  static Predicate from_json(const Json& j);
};

/// Command applied to a fresh fleet before the task starts; never scored.
struct SetupCommand {
  int drone_id = 1;
  sim::Command command;
};

struct TaskSpec {
  std::string id;
  Complexity complexity = Complexity::easy;
  std::string prompt;
  std::map<int, std::vector<ExpectedAction>> expected;  // easy/medium
  std::vector<Predicate> predicates;                     // hard
  std::vector<SetupCommand> setup;
  int max_points = 0;

  /// Drones the task needs a worker for.
  std::vector<int> required_drones() const;
  Json to_json() const;
  static TaskSpec from_json(const Json& j);
};

struct SuiteLoad {
  std::vector<TaskSpec> tasks;
  std::array<int, 3> totals{};  // max points per complexity
  std::array<int, 3> counts{};  // tasks per complexity
  std::vector<std::string> warnings;
};

/// Per-complexity maxima of the bundled suite.
inline constexpr std::array<int, 3> kSuiteTotals = {14, 36, 13};

SuiteLoad load_suite(const std::filesystem::path& path);
SuiteLoad parse_suite(const Json& doc);

}  // namespace aeroreact::eval
