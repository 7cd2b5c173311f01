#include "aeroreact/agents/worker.hpp"

namespace aeroreact::agents {

namespace {

ThreadHistory start_thread(const DroneTask& task, int drone_id) {
  ThreadHistory h;
  h.drone_id = drone_id;
  h.task = task;
  return h;
}

std::string last_action_text(const ActionRecord& a) {
  std::string text = "Action: " + describe_call(a.call) + ", Success: " + (a.result.success ? "True" : "False");
  text += (a.call.tool_name == "analyze_image" ? ", Raw Result: " : ", Message: ") + a.result.message;
  return text;
}

}  // namespace

std::string tools_text(tools::Method method) { return tools::tool_schema_document(method)["tools"].dump(); }

Worker::Worker(llm::Backend& backend, tools::World& world, AgentOptions options, AgentObserver* observer)
    : backend_(backend), world_(world), options_(options), observer_(observer) {}

llm::StructuredOutput Worker::ask(const std::string& thread, llm::TemplateId id,
                                  const llm::PromptContext& context) {
  return llm::complete(backend_, thread, id, llm::render(id, context), options_.max_retries);
}

std::string Worker::drone_state_text(int drone_id) const {
  return sim::to_json(world_.fleet.drone(drone_id)).dump();
}

ActionRecord Worker::execute(tools::Method method, int drone_id, const Json& function_call) {
  ActionRecord record;
  record.call.tool_name = function_call.at("function_call").get<std::string>();
  record.call.parameters = function_call.value("parameters", Json::object());
  record.call.drone_id = drone_id;
  record.result = tools::invoke(record.call, method, world_);
  record.state_after = world_.fleet.drone(drone_id);
  if (observer_) observer_->on_action(drone_id, record);
  return record;
}

ThreadHistory Worker::react_eval(const DroneTask& task, int drone_id, const std::string& thread) {
  ThreadHistory h = start_thread(task, drone_id);
  const std::string tools = tools_text(tools::Method::reacteval);
  while (!h.complete && h.iteration < options_.max_iters) {
    ++h.iteration;
    Step step;
    try {
      auto reasoning = ask(thread, llm::TemplateId::reason,
                           {{"plan", task.plan},
                            {"expected_outcome", task.expected_outcome},
                            {"drone_state", drone_state_text(drone_id)},
                            {"history", h.render_for_prompt()}});
      step.reasoning = reasoning.parsed;
      if (observer_) observer_->on_reason(drone_id, reasoning.parsed);

      auto call = ask(thread, llm::TemplateId::act,
                      {{"intended_action", reasoning.parsed["intended_action"].get<std::string>()},
                       {"reasoning", reasoning.parsed["reasoning"].get<std::string>()},
                       {"drone_state", drone_state_text(drone_id)},
                       {"tools", tools}});
      step.action = execute(tools::Method::reacteval, drone_id, call.parsed);

      auto evaluation = ask(thread, llm::TemplateId::evaluate,
                            {{"plan", task.plan},
                             {"expected_outcome", task.expected_outcome},
                             {"history", h.render_for_prompt()},
                             {"last_action", last_action_text(*step.action)},
                             {"drone_state", drone_state_text(drone_id)}});
      step.evaluation = evaluation.parsed;
      if (observer_) observer_->on_evaluation(drone_id, evaluation.parsed);
      h.complete = evaluation.parsed["end_flag"].get<bool>();
    } catch (const std::runtime_error& e) {
      h.steps.push_back(std::move(step));
      h.abort_reason = e.what();
      if (observer_) observer_->on_error(drone_id, e.what());
      break;
    }
    h.steps.push_back(std::move(step));
  }
  return h;
}

ThreadHistory Worker::react(const DroneTask& task, int drone_id, const std::string& thread) {
  ThreadHistory h = start_thread(task, drone_id);
  const std::string tools = tools_text(tools::Method::react);
  while (!h.complete && h.iteration < options_.max_iters) {
    ++h.iteration;
    Step step;
    try {
      auto reasoning = ask(thread, llm::TemplateId::reason_with_end_flag,
                           {{"plan", task.plan},
                            {"expected_outcome", task.expected_outcome},
                            {"drone_state", drone_state_text(drone_id)},
                            {"history", h.render_for_prompt()}});
      step.reasoning = reasoning.parsed;
      if (observer_) observer_->on_reason(drone_id, reasoning.parsed);
      h.complete = reasoning.parsed["end_flag"].get<bool>();
      if (!h.complete) {
        auto call = ask(thread, llm::TemplateId::act,
                        {{"intended_action", reasoning.parsed["intended_action"].get<std::string>()},
                         {"reasoning", reasoning.parsed["reasoning"].get<std::string>()},
                         {"drone_state", drone_state_text(drone_id)},
                         {"tools", tools}});
        step.action = execute(tools::Method::react, drone_id, call.parsed);
      }
    } catch (const std::runtime_error& e) {
      h.steps.push_back(std::move(step));
      h.abort_reason = e.what();
      if (observer_) observer_->on_error(drone_id, e.what());
      break;
    }
    h.steps.push_back(std::move(step));
  }
  return h;
}

ThreadHistory Worker::act(const DroneTask& task, int drone_id, const std::string& thread) {
  ThreadHistory h = start_thread(task, drone_id);
  const std::string tools = tools_text(tools::Method::act);
  while (!h.complete && h.iteration < options_.max_iters) {
    ++h.iteration;
    Step step;
    try {
      auto call = ask(thread, llm::TemplateId::act_direct,
                      {{"plan", task.plan},
                       {"expected_outcome", task.expected_outcome},
                       {"drone_state", drone_state_text(drone_id)},
                       {"history", h.render_for_prompt()},
                       {"tools", tools}});
      step.action = execute(tools::Method::act, drone_id, call.parsed);
      h.complete = step.action->result.is_end_signal();
    } catch (const std::runtime_error& e) {
      h.steps.push_back(std::move(step));
      h.abort_reason = e.what();
      if (observer_) observer_->on_error(drone_id, e.what());
      break;
    }
    h.steps.push_back(std::move(step));
  }
  return h;
}

ThreadHistory Worker::run(tools::Method method, const DroneTask& task, int drone_id, const std::string& thread) {
  switch (method) {
    case tools::Method::reacteval: return react_eval(task, drone_id, thread);
    case tools::Method::react: return react(task, drone_id, thread);
    case tools::Method::act: return act(task, drone_id, thread);
  }
  return react_eval(task, drone_id, thread);
}

}  // namespace aeroreact::agents
