#include "aeroreact/eval/scoring.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>

namespace aeroreact::eval {

namespace {

constexpr std::array<std::string_view, 3> kFailureNames = {"incorrect_function_calls", "early_stopping",
                                                           "head_agent_failure"};

std::vector<double> point_of(const Predicate& p) { return p.spec.at("point").get<std::vector<double>>(); }

// Horizontal distance for 2D targets, full 3D distance otherwise.
double distance_to(const sim::DroneState& s, const std::vector<double>& point) {
  const double dx = s.x - point.at(0);
  const double dy = s.y - point.at(1);
  const double dz = point.size() > 2 ? s.z - point[2] : 0.0;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

template <typename Fn>
bool any_action(const Predicate& p, const agents::RunResult& run, Fn&& fn) {
  for (const auto& [id, thread] : run.threads) {
    if (p.drone && *p.drone != id) continue;
    for (const auto* a : thread.actions()) {
      if (a->call.tool_name == tools::kTerminateTool) continue;
      if (a->result.success && fn(*a)) return true;
    }
  }
  return false;
}

}  // namespace

std::string_view to_string(FailureMode mode) { return kFailureNames[static_cast<size_t>(mode)]; }

std::optional<FailureMode> parse_failure_mode(std::string_view name) {
  for (size_t i = 0; i < kFailureNames.size(); ++i) {
    if (kFailureNames[i] == name) return static_cast<FailureMode>(i);
  }
  return std::nullopt;
}

ExecutedActions executed_actions(const agents::RunResult& run) {
  ExecutedActions out;
  for (const auto& [id, thread] : run.threads) {
    auto& list = out[id];
    for (const auto* a : thread.actions()) {
      if (a->call.tool_name != tools::kTerminateTool) list.push_back(*a);
    }
  }
  return out;
}

int score_drone(const std::vector<agents::ActionRecord>& executed, const std::vector<ExpectedAction>& expected) {
  size_t matched = 0;
  for (const auto& a : executed) {
    if (matched == expected.size()) break;
    if (a.call.tool_name == tools::kTerminateTool) continue;
    if (!a.result.success || !expected[matched].matches(a.call)) break;
    ++matched;
  }
  return static_cast<int>(matched);
}

SequentialScore score_sequential(const ExecutedActions& executed,
                                 const std::map<int, std::vector<ExpectedAction>>& expected) {
  SequentialScore score;
  for (const auto& [id, seq] : expected) {
    const auto it = executed.find(id);
    const int points = it == executed.end() ? 0 : score_drone(it->second, seq);
    score.per_drone[id] = points;
    score.points += points;
  }
  return score;
}

bool predicate_satisfied(const Predicate& p, const agents::RunResult& run) {
  if (p.type == "response_mentions") {
    return lower(run.response).find(lower(p.spec.at("text").get<std::string>())) != std::string::npos;
  }
  if (p.type == "action_succeeded") {
    const auto tool = p.spec.at("tool").get<std::string>();
    return any_action(p, run, [&](const agents::ActionRecord& a) { return a.call.tool_name == tool; });
  }
  if (p.type == "reached") {
    const auto point = point_of(p);
    const double tol = p.spec.value("tolerance", 1.0);
    return any_action(p, run, [&](const agents::ActionRecord& a) { return distance_to(a.state_after, point) <= tol; });
  }
  if (p.type == "captured_near") {
    const auto point = point_of(p);
    const double tol = p.spec.value("tolerance", 1.0);
    const bool facing = p.spec.value("facing", false);
    return any_action(p, run, [&](const agents::ActionRecord& a) {
      return a.call.tool_name == "capture_image" && distance_to(a.state_after, point) <= tol &&
             (!facing || tools::in_facing_half_plane(a.state_after, point[0], point[1]));
    });
  }
  if (p.type == "captured_from_side") {
    const auto point = point_of(p);
    const bool left = p.spec.at("side").get<std::string>() == "left";
    return any_action(p, run, [&](const agents::ActionRecord& a) {
      const auto& s = a.state_after;
      return a.call.tool_name == "capture_image" && (left ? s.x < point[0] : s.x > point[0]) &&
             tools::in_facing_half_plane(s, point[0], point[1]);
    });
  }
  if (p.type == "analyzed") {
    const auto image = p.spec.at("image").get<std::string>();
    return any_action(p, run, [&](const agents::ActionRecord& a) {
      return (a.call.tool_name == "analyze_image" || a.call.tool_name == "analyze_gauges") &&
             a.result.image() == image;
    });
  }
  return false;
}

std::vector<bool> score_subtasks(const agents::RunResult& run, const std::vector<Predicate>& predicates) {
  std::vector<bool> out;
  out.reserve(predicates.size());
  for (const auto& p : predicates) out.push_back(predicate_satisfied(p, run));
  return out;
}

std::optional<FailureMode> classify_failure(const agents::RunResult& run, const TaskSpec& task, int points) {
  if (points >= task.max_points) return std::nullopt;
  if (!run.plan.ok()) return FailureMode::head_agent_failure;
  const auto required = task.required_drones();
  for (int id : required) {
    if (!run.threads.count(id)) return FailureMode::head_agent_failure;
  }
  if (run.threads.empty()) return FailureMode::head_agent_failure;

  const bool self_terminated = std::all_of(run.threads.begin(), run.threads.end(), [](const auto& kv) {
    return kv.second.complete && !kv.second.aborted();
  });

  bool prefix = true;
  if (task.complexity == Complexity::hard) {
    const auto results = score_subtasks(run, task.predicates);
    const auto first_miss = std::find(results.begin(), results.end(), false);
    prefix = std::find(first_miss, results.end(), true) == results.end();
  } else {
    for (const auto& [id, actions] : executed_actions(run)) {
      const auto it = task.expected.find(id);
      const int matched = it == task.expected.end() ? 0 : score_drone(actions, it->second);
      if (static_cast<size_t>(matched) != actions.size()) prefix = false;
    }
  }
  return prefix && self_terminated ? FailureMode::early_stopping : FailureMode::incorrect_function_calls;
}

Json TaskScore::to_json() const {
  Json j{{"task", task_id},
         {"complexity", to_string(complexity)},
         {"points", points},
         {"max_points", max_points},
         {"elapsed", elapsed},
         {"failure_mode", failure ? Json(to_string(*failure)) : Json()}};
  if (complexity == Complexity::hard) {
    j["subtasks"] = subtasks;
  } else {
    Json d = Json::object();
    for (const auto& [id, p] : per_drone) d[std::to_string(id)] = p;
    j["per_drone"] = d;
  }
  return j;
}

TaskScore TaskScore::from_json(const Json& j) {
  TaskScore s;
  s.task_id = j.at("task").get<std::string>();
  s.complexity = parse_complexity(j.at("complexity").get<std::string>()).value_or(Complexity::easy);
  s.points = j.at("points").get<int>();
  s.max_points = j.at("max_points").get<int>();
  s.elapsed = j.value("elapsed", 0.0);
  if (j.contains("failure_mode") && j["failure_mode"].is_string()) {
    s.failure = parse_failure_mode(j["failure_mode"].get<std::string>());
  }
  if (j.contains("subtasks")) s.subtasks = j["subtasks"].get<std::vector<bool>>();
  if (j.contains("per_drone")) {
    for (const auto& [k, v] : j["per_drone"].items()) s.per_drone[std::stoi(k)] = v.get<int>();
  }
  return s;
}

TaskScore score_task(const TaskSpec& task, const agents::RunResult& run, double elapsed) {
  TaskScore s;
  s.task_id = task.id;
  s.complexity = task.complexity;
  s.max_points = task.max_points;
  s.elapsed = elapsed;
  if (task.complexity == Complexity::hard) {
    s.subtasks = score_subtasks(run, task.predicates);
    s.points = static_cast<int>(std::count(s.subtasks.begin(), s.subtasks.end(), true));
  } else {
    const auto seq = score_sequential(executed_actions(run), task.expected);
    s.points = seq.points;
    s.per_drone = seq.per_drone;
  }
  s.failure = classify_failure(run, task, s.points);
  return s;
}

}  // namespace aeroreact::eval
