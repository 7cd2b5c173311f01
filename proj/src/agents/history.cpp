#include "aeroreact/agents/history.hpp"

#include <sstream>
#include <stdexcept>

namespace aeroreact::agents {

namespace {

std::string value_text(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return sim::format_number(v.get<double>());
  return v.dump();
}

std::string text_of(const Json& record, const char* key) {
  if (!record.contains(key)) return "";
  return value_text(record[key]);
}

}  // namespace

std::string describe_call(const tools::ToolCall& call) {
  std::string out = call.tool_name + "(";
  bool first = true;
  for (const auto& [key, value] : call.parameters.items()) {
    if (!first) out += ", ";
    out += key + "=" + value_text(value);
    first = false;
  }
  return out + ")";
}

HeadPlan HeadPlan::from_parsed(const Json& parsed) {
  HeadPlan plan;
  for (const auto& [key, value] : parsed.items()) {
    if (key == "response_to_user") {
      plan.response_to_user = value.get<std::string>();
      continue;
    }
    plan.per_drone[std::stoi(key)] = {value.at("plan").get<std::string>(),
                                      value.at("expected_outcome").get<std::string>(),
                                      value.at("end_flag").get<bool>()};
  }
  return plan;
}

Json HeadPlan::to_json() const {
  Json j = Json::object();
  for (const auto& [id, task] : per_drone) {
    j[std::to_string(id)] = {
        {"plan", task.plan}, {"expected_outcome", task.expected_outcome}, {"end_flag", task.end_flag}};
  }
  j["response_to_user"] = response_to_user;
  return j;
}

Json ActionRecord::to_json() const {
  Json j{{"tool", call.tool_name}, {"parameters", call.parameters}};
  const Json r = result.to_json();
  j["success"] = r["success"];
  j["message"] = r["message"];
  if (r.contains("payload")) j["payload"] = r["payload"];
  j["state"] = sim::to_json(state_after);
  return j;
}

ActionRecord ActionRecord::from_json(const Json& j, int drone_id) {
  ActionRecord a;
  a.call.tool_name = j.at("tool").get<std::string>();
  a.call.parameters = j.value("parameters", Json::object());
  a.call.drone_id = drone_id;
  a.result = tools::ToolResult::from_json(j);
  a.state_after = sim::drone_from_json(j.at("state"));
  return a;
}

std::vector<const ActionRecord*> ThreadHistory::actions() const {
  std::vector<const ActionRecord*> out;
  for (const auto& s : steps) {
    if (s.action) out.push_back(&*s.action);
  }
  return out;
}

std::string ThreadHistory::to_jsonl() const {
  std::string out;
  for (size_t i = 0; i < steps.size(); ++i) {
    const Step& s = steps[i];
    Json line{{"step", i + 1}};
    if (s.reasoning) line["reasoning"] = *s.reasoning;
    if (s.action) line["action"] = s.action->to_json();
    if (s.evaluation) line["evaluation"] = *s.evaluation;
    out += line.dump() + '\n';
  }
  Json trailer{{"complete", complete}, {"iterations", iteration}};
  if (abort_reason) trailer["abort"] = *abort_reason;
  out += trailer.dump() + '\n';
  return out;
}

ThreadHistory ThreadHistory::from_jsonl(const std::string& text, int drone_id) {
  ThreadHistory h;
  h.drone_id = drone_id;
  std::istringstream in(text);
  std::string line;
  bool saw_trailer = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const Json j = Json::parse(line);
    if (j.contains("step")) {
      Step s;
      if (j.contains("reasoning")) s.reasoning = j["reasoning"];
      if (j.contains("action")) s.action = ActionRecord::from_json(j["action"], drone_id);
      if (j.contains("evaluation")) s.evaluation = j["evaluation"];
      h.steps.push_back(std::move(s));
    } else {
      h.complete = j.at("complete").get<bool>();
      h.iteration = j.at("iterations").get<int>();
      if (j.contains("abort")) h.abort_reason = j["abort"].get<std::string>();
      saw_trailer = true;
    }
  }
  if (!saw_trailer) throw std::runtime_error("thread transcript has no trailer line");
  return h;
}

std::string ThreadHistory::render_for_prompt() const {
  if (steps.empty()) return "No actions taken yet.";
  std::ostringstream os;
  for (size_t i = 0; i < steps.size(); ++i) {
    const Step& s = steps[i];
    os << "Step " << i + 1 << ":\n";
    if (s.reasoning) {
      os << "  Reasoning: " << text_of(*s.reasoning, "reasoning") << '\n';
      if (s.reasoning->contains("intended_action")) {
        os << "  Intended action: " << text_of(*s.reasoning, "intended_action") << '\n';
      }
    }
    if (s.action) {
      os << "  Action: " << describe_call(s.action->call)
         << ", Success: " << (s.action->result.success ? "True" : "False")
         << ", Message: " << s.action->result.message << '\n';
    }
    if (s.evaluation) {
      os << "  Evaluation: " << text_of(*s.evaluation, "evaluation_summary") << '\n';
      os << "  Next steps: " << text_of(*s.evaluation, "next_steps_notes") << '\n';
    }
  }
  return os.str();
}

Json DroneOutcome::to_json() const {
  Json j{{"drone_id", drone_id}, {"complete", complete}, {"iterations", iterations}, {"actions", actions}};
  if (abort_reason) j["abort"] = *abort_reason;
  return j;
}

DroneOutcome DroneOutcome::from_json(const Json& j) {
  DroneOutcome o;
  o.drone_id = j.at("drone_id").get<int>();
  o.complete = j.at("complete").get<bool>();
  o.iterations = j.at("iterations").get<int>();
  o.actions = j.at("actions").get<std::vector<std::string>>();
  if (j.contains("abort")) o.abort_reason = j["abort"].get<std::string>();
  return o;
}

DroneOutcome DroneOutcome::summarize(const ThreadHistory& thread) {
  DroneOutcome o;
  o.drone_id = thread.drone_id;
  o.complete = thread.complete;
  o.iterations = thread.iteration;
  o.abort_reason = thread.abort_reason;
  for (const ActionRecord* a : thread.actions()) {
    o.actions.push_back(describe_call(a->call) + ": " + (a->result.success ? "ok" : "failed") + " - " +
                        a->result.message);
  }
  return o;
}

Json SessionEntry::to_json() const {
  Json outs = Json::array();
  for (const auto& o : outcomes) outs.push_back(o.to_json());
  return {{"user_input", user_input}, {"head_plan", head_plan}, {"outcomes", outs}, {"response", response}};
}

SessionEntry SessionEntry::from_json(const Json& j) {
  SessionEntry e;
  e.user_input = j.at("user_input").get<std::string>();
  e.head_plan = j.at("head_plan");
  for (const auto& o : j.at("outcomes")) e.outcomes.push_back(DroneOutcome::from_json(o));
  e.response = j.at("response").get<std::string>();
  return e;
}

std::string SessionHistory::render_for_prompt() const {
  if (entries_.empty()) return "No previous tasks in this session.";
  std::ostringstream os;
  for (size_t i = 0; i < entries_.size(); ++i) {
    const SessionEntry& e = entries_[i];
    os << "Task " << i + 1 << ": " << e.user_input << '\n';
    os << "  Plan: " << e.head_plan.dump() << '\n';
    for (const auto& o : e.outcomes) {
      os << "  Drone " << o.drone_id << ": " << (o.complete ? "complete" : "incomplete") << " after "
         << o.iterations << " step(s)";
      if (o.abort_reason) os << ", aborted: " << *o.abort_reason;
      os << '\n';
      for (const auto& a : o.actions) os << "    - " << a << '\n';
    }
    os << "  Response: " << e.response << '\n';
  }
  return os.str();
}

}  // namespace aeroreact::agents
