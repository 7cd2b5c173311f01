#include "aeroreact/agents/head.hpp"

#include <sstream>

namespace aeroreact::agents {

namespace {

std::string results_text(const PlanOutcome& plan, const std::map<int, ThreadHistory>& results) {
  std::ostringstream os;
  if (!plan.ok()) os << "Planning failed: " << plan.failure << '\n';
  if (results.empty()) os << "No worker agents were dispatched.\n";
  for (const auto& [id, thread] : results) {
    const DroneOutcome o = DroneOutcome::summarize(thread);
    os << "Drone " << id << ": " << (o.complete ? "task complete" : "task incomplete") << " after "
       << o.iterations << " step(s)";
    if (o.abort_reason) os << "; aborted: " << *o.abort_reason;
    os << '\n';
    for (const auto& a : o.actions) os << "  - " << a << '\n';
  }
  return os.str();
}

Json thread_to_json(const ThreadHistory& t) {
  Json lines = Json::array();
  std::istringstream in(t.to_jsonl());
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) lines.push_back(Json::parse(line));
  }
  return {{"drone_id", t.drone_id},
          {"task", {{"plan", t.task.plan}, {"expected_outcome", t.task.expected_outcome}}},
          {"transcript", std::move(lines)}};
}

ThreadHistory thread_from_json(const Json& j) {
  std::string text;
  for (const auto& line : j.at("transcript")) text += line.dump() + '\n';
  ThreadHistory t = ThreadHistory::from_jsonl(text, j.at("drone_id").get<int>());
  t.task.plan = j.at("task").value("plan", "");
  t.task.expected_outcome = j.at("task").value("expected_outcome", "");
  return t;
}

}  // namespace

std::string head_thread(const std::string& run_label) { return run_label + "/head"; }
std::string worker_thread(const std::string& run_label, int drone_id) {
  return run_label + "/drone-" + std::to_string(drone_id);
}

Json PlanOutcome::to_json() const {
  Json j = Json::object();
  j["ok"] = ok();
  if (plan) j["plan"] = plan->to_json();
  if (!failure.empty()) j["failure"] = failure;
  j["raw"] = raw_text;
  return j;
}

PlanOutcome PlanOutcome::from_json(const Json& j) {
  PlanOutcome p;
  if (j.contains("plan")) p.plan = HeadPlan::from_parsed(j["plan"]);
  p.failure = j.value("failure", "");
  p.raw_text = j.value("raw", "");
  return p;
}

Json RunResult::to_json() const {
  Json threads_json = Json::object();
  for (const auto& [id, t] : threads) threads_json[std::to_string(id)] = thread_to_json(t);
  return {{"run", run_label},
          {"user_input", user_input},
          {"method", tools::to_string(method)},
          {"plan", plan.to_json()},
          {"threads", std::move(threads_json)},
          {"response", response},
          {"response_fallback", response_fallback},
          {"final_fleet", final_fleet}};
}

RunResult RunResult::from_json(const Json& j) {
  RunResult r;
  r.run_label = j.value("run", "");
  r.user_input = j.at("user_input").get<std::string>();
  if (auto m = tools::parse_method(j.value("method", "reacteval"))) r.method = *m;
  r.plan = PlanOutcome::from_json(j.at("plan"));
  for (const auto& [key, t] : j.at("threads").items()) r.threads[std::stoi(key)] = thread_from_json(t);
  r.response = j.value("response", "");
  r.response_fallback = j.value("response_fallback", false);
  r.final_fleet = j.value("final_fleet", Json());
  return r;
}

HeadAgent::HeadAgent(llm::Backend& backend, tools::World& world, AgentOptions options, AgentObserver* observer)
    : backend_(backend), world_(world), options_(options), observer_(observer) {}

PlanOutcome HeadAgent::plan(const std::string& user_input, const std::string& run_label) {
  PlanOutcome outcome;
  try {
    const std::string prompt = llm::render(llm::TemplateId::plan,
                                           {{"n_drones", std::to_string(world_.fleet.size())},
                                            {"user_input", user_input},
                                            {"session_history", session_.render_for_prompt()},
                                            {"drone_states", world_.fleet.snapshot().dump()}});
    auto out = llm::complete(backend_, head_thread(run_label), llm::TemplateId::plan, prompt, options_.max_retries);
    outcome.raw_text = out.raw_text;
    HeadPlan plan = HeadPlan::from_parsed(out.parsed);
    for (const auto& [id, task] : plan.per_drone) {
      if (!world_.fleet.contains(id)) {
        outcome.failure = "plan assigns drone " + std::to_string(id) + " but the fleet has " +
                          std::to_string(world_.fleet.size()) + " drone(s)";
        return outcome;
      }
    }
    outcome.plan = std::move(plan);
  } catch (const std::runtime_error& e) {
    outcome.failure = e.what();
  }
  return outcome;
}

std::string HeadAgent::respond(const std::string& user_input, const PlanOutcome& plan,
                               const std::map<int, ThreadHistory>& results, const std::string& run_label,
                               bool* used_fallback) {
  if (used_fallback) *used_fallback = false;
  try {
    const std::string prompt =
        llm::render(llm::TemplateId::respond,
                    {{"user_input", user_input},
                     {"drone_tasks", plan.ok() ? plan.plan->to_json().dump() : "{\"failure\": " + Json(plan.failure).dump() + "}"},
                     {"results", results_text(plan, results)}});
    auto out = llm::complete(backend_, head_thread(run_label), llm::TemplateId::respond, prompt, options_.max_retries);
    std::string text = out.parsed["response"].get<std::string>();
    if (!text.empty()) return text;
    if (used_fallback) *used_fallback = true;
    return fallback_response(user_input, plan, results, "empty response");
  } catch (const std::runtime_error& e) {
    if (observer_) observer_->on_error(std::nullopt, e.what());
    if (used_fallback) *used_fallback = true;
    return fallback_response(user_input, plan, results, e.what());
  }
}

RunResult HeadAgent::execute(const std::string& user_input, tools::Method method, const std::string& run_label) {
  RunResult run;
  run.run_label = run_label;
  run.user_input = user_input;
  run.method = method;
  run.plan = plan(user_input, run_label);
  if (observer_) {
    observer_->on_head_plan(run.plan);
    if (!run.plan.ok()) observer_->on_error(std::nullopt, "head agent failure: " + run.plan.failure);
  }

  if (run.plan.ok()) {
    Worker worker(backend_, world_, options_, observer_);
    // std::map iterates in ascending drone id.
    for (const auto& [id, task] : run.plan.plan->per_drone) {
      if (task.end_flag) continue;
      run.threads[id] = worker.run(method, task, id, worker_thread(run_label, id));
    }
  }

  run.response = respond(user_input, run.plan, run.threads, run_label, &run.response_fallback);
  run.final_fleet = world_.fleet.snapshot();

  SessionEntry entry;
  entry.user_input = user_input;
  entry.head_plan = run.plan.ok() ? run.plan.plan->to_json() : Json{{"failure", run.plan.failure}};
  for (const auto& [id, t] : run.threads) entry.outcomes.push_back(DroneOutcome::summarize(t));
  entry.response = run.response;
  session_.append(std::move(entry));

  if (observer_) observer_->on_response(run.response);
  return run;
}

std::string fallback_response(const std::string& user_input, const PlanOutcome& plan,
                              const std::map<int, ThreadHistory>& results, const std::string& reason) {
  std::ostringstream os;
  os << "Summary for request \"" << user_input << "\" (automatic summary: " << reason << "). ";
  if (!plan.ok()) {
    os << "Planning failed: " << plan.failure << ". ";
  } else if (results.empty() && !plan.plan->response_to_user.empty()) {
    os << plan.plan->response_to_user << ' ';
  }
  if (results.empty()) os << "No drone actions were executed.";
  for (const auto& [id, t] : results) {
    os << "Drone " << id << ": ";
    if (t.aborted()) {
      os << "failed (" << *t.abort_reason << ")";
    } else {
      os << (t.complete ? "completed" : "did not finish") << " after " << t.iteration << " step(s)";
    }
    os << ". ";
  }
  std::string s = os.str();
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s;
}

}  // namespace aeroreact::agents
