#include "aeroreact/llm/templates.hpp"

#include <algorithm>
#include <array>

namespace aeroreact::llm {

namespace {

constexpr std::array<std::string_view, 7> kNames = {
    "plan", "reason", "reason_with_end_flag", "act", "evaluate", "respond", "act_direct"};

constexpr std::string_view kPlan = R"(Role: Head Agent -- Multi-Drone Task Planning

Number of Drones: {{n_drones}}

User Request: {{user_input}}

Session History: {{session_history}}

Current Drone States: {{drone_states}}

Instructions:
- Based on the user's request, session history, and current drone states, provide a JSON object with:
  - Keys "1", "2", etc., representing drone IDs.
  - Each drone's value is a JSON object with:
    - plan: A string with a step-by-step plan for that drone. Steps must be logical and respect drone capabilities. Exclude steps checking success/failure of prior steps.
    - expected_outcome: A string describing the state signifying that drone's plan completion.
    - end_flag: Boolean (true for simple/informational tasks, false for action sequences).
  - response_to_user: A string for user feedback or drone state information.

Example 1: (User Input: "Drone 1, take off and move forward 5 meters. Drone 2, takeoff and move backward 2m.")
{"1": {
    "plan": "1. Takeoff.\n2. Move to (5, 0, 1).",
    "expected_outcome": "Drone 1 is located at (5, 0, 1).",
    "end_flag": false
  },
  "2": {
    "plan": "1. Takeoff.\n2. Move to (0, -2, 1).",
    "expected_outcome": "Drone 2 is located at (0, -2, 1).",
    "end_flag": false
  },
  "response_to_user": ""}
)";

constexpr std::string_view kReasonInputs = R"(Role: Worker Agent -- Task Reasoning

Goal: Determine the single best next action to complete the plan using the current context.

Inputs:
- Overall Plan: {{plan}}
- Expected Final Outcome: {{expected_outcome}}
- Current Drone State: {{drone_state}}
- History of Actions/Evaluations: {{history}}

Available Capabilities:
- Drone Functions: Takeoff, Land, Move, Rotate, Move gimbal, Capture image.
- Model Functions: Analyze image, Analyze gauges.
)";

constexpr std::string_view kReasonOutput = R"(
Output Format: A JSON object with the following keys:
- reasoning: A concise explanation for the chosen action.
- intended_action: A concise description of the single action to be taken.

Example: (Plan: "1. Takeoff. 2. Navigate to (5, 2, 3)." Current Position: (2, 0, 1))
{"reasoning": "The drone has completed takeoff and is at (2, 0, 1). To reach target (5, 2, 3), I need to move: right 3m (2 to 5 on x-axis), forward 2m (0 to 2 on y-axis), and up 2m (1 to 3 on z-axis). I'll start with the x-axis movement since it's the largest distance.",
  "intended_action": "Move right 3 meters."}
)";

constexpr std::string_view kReasonEndFlagOutput = R"(
Output Format: A JSON object with the following keys:
- reasoning: A concise explanation for the chosen action.
- intended_action: A concise description of the single action to be taken.
- end_flag: A boolean. Set it to true if and only if every step of the plan is already finished, in which case no action will be executed.

Example: (Plan: "1. Takeoff. 2. Navigate to (5, 2, 3)." Current Position: (2, 0, 1))
{"reasoning": "The drone has completed takeoff and is at (2, 0, 1). To reach target (5, 2, 3), I need to move: right 3m (2 to 5 on x-axis), forward 2m (0 to 2 on y-axis), and up 2m (1 to 3 on z-axis). I'll start with the x-axis movement since it's the largest distance.",
  "intended_action": "Move right 3 meters.",
  "end_flag": false}

Example: (Plan: "1. Takeoff. 2. Navigate to (5, 2, 3)." Current Position: (5, 2, 3))
{"reasoning": "The drone is at (5, 2, 3), which is the target. Every step of the plan is complete.",
  "intended_action": "None.",
  "end_flag": true}
)";

constexpr std::string_view kAct = R"(Role: Worker Agent -- Action Formulation

Goal: Select the correct function call and parameters to execute the intended action.

Inputs:
- Intended Action: {{intended_action}}
- Reasoning: {{reasoning}}
- Current Drone State: {{drone_state}}
- Available Tools: {{tools}}

Instructions:
- Based only on the Intended Action and Available Tools, formulate the precise function call(s).
- Ensure parameters are correct based on the action and current state.
- You MUST use a function call.

Output: A JSON object representing the function call.

Example: (Intended Action: "Move forward 10 meters.")
{"function_call": "move",
  "parameters": {
    "direction": "forward",
    "distance": 10}}
)";

constexpr std::string_view kEvaluate = R"(Role: Worker Agent -- Evaluation

Goal: Evaluate the outcome of the last action and determine if the overall task is complete.

Inputs:
- Overall Plan: {{plan}}
- Expected Final Outcome: {{expected_outcome}}
- Thread History: {{history}}
- Last Action: {{last_action}}
- Drone State After Action: {{drone_state}}

Instructions:
- Assess if the most recent action was successful in progressing the plan.
- Use the drone state to confirm the action's outcome.
- Set end_flag to true if and only if all steps in the plan are finished.
- Provide guidance for the next reasoning step in next_steps_notes.

Output Format: A JSON object with the following keys:
- evaluation_summary: A concise summary of the action's success.
- end_flag: A boolean indicating if the entire plan is complete.
- next_steps_notes: Brief notes to guide the next reasoning step.

Example: (Plan: "Move right 3m, then forward 3m, then up 2m." Last Action: Move right 3m. New Position: (3, 0, 1))
{"evaluation_summary": "Right 3m movement succeeded. Drone progressed from (0, 0, 1) to (3, 0, 1), completing the first part of the navigation.",
  "end_flag": false,
  "next_steps_notes": "From current position (3, 0, 1), the next logical step is to move forward 3m."}
)";

constexpr std::string_view kRespond = R"(Role: Head Agent -- User Response

User Request: {{user_input}}

Drone Tasks: {{drone_tasks}}

Results: {{results}}

Instructions:
- Summarize for the user what each drone did and whether its task succeeded.
- Include any image descriptions or gauge readings the drones reported.
- Mention failures plainly.

Output Format: A JSON object with the key:
- response: The message shown to the user.
)";

constexpr std::string_view kActDirectHead = R"(Role: Worker Agent -- Direct Action

Goal: Select the single next function call that progresses the plan.

Inputs:
- Overall Plan: {{plan}}
- Expected Final Outcome: {{expected_outcome}}
- Current Drone State: {{drone_state}}
- History of Actions: {{history}}
- Available Tools: {{tools}}

Available Capabilities:
- Drone Functions: Takeoff, Land, Move, Rotate, Move gimbal, Capture image.
- Model Functions: Analyze image, Analyze gauges.
- Control: terminate, which ends the task. Call it once every step of the plan is finished.

Instructions:
- Based on the plan, the drone state and the history, formulate the precise function call.
- Ensure parameters are correct based on the plan and current state.
- You MUST use a function call.

Output: A JSON object representing the function call.

Example: (Plan: "1. Takeoff. 2. Move forward 10 meters." History: takeoff succeeded)
{"function_call": "move",
  "parameters": {
    "direction": "forward",
    "distance": 10}}

Example: (Plan: "1. Takeoff." History: takeoff succeeded)
{"function_call": "terminate", "parameters": {}}
)";

const std::string& body_storage(TemplateId id) {
  static const std::array<std::string, 7> bodies = {
      std::string(kPlan),
      std::string(kReasonInputs) + std::string(kReasonOutput),
      std::string(kReasonInputs) + std::string(kReasonEndFlagOutput),
      std::string(kAct),
      std::string(kEvaluate),
      std::string(kRespond),
      std::string(kActDirectHead),
  };
  return bodies[static_cast<size_t>(id)];
}

}  // namespace

std::string_view to_string(TemplateId id) { return kNames[static_cast<size_t>(id)]; }

std::optional<TemplateId> parse_template_id(std::string_view name) {
  for (size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == name) return static_cast<TemplateId>(i);
  }
  return std::nullopt;
}

RenderError::RenderError(TemplateId id, std::string placeholder)
    : std::runtime_error("template '" + std::string(to_string(id)) + "' has unbound placeholder '" +
                         placeholder + "'"),
      placeholder_(std::move(placeholder)) {}

std::string_view template_body(TemplateId id) { return body_storage(id); }

std::vector<std::string> placeholders(TemplateId id) {
  std::vector<std::string> names;
  const std::string& body = body_storage(id);
  size_t pos = 0;
  while ((pos = body.find("{{", pos)) != std::string::npos) {
    const size_t end = body.find("}}", pos + 2);
    if (end == std::string::npos) break;
    std::string name = body.substr(pos + 2, end - pos - 2);
    if (std::find(names.begin(), names.end(), name) == names.end()) names.push_back(std::move(name));
    pos = end + 2;
  }
  return names;
}

std::string render(TemplateId id, const PromptContext& context) {
  const std::string& body = body_storage(id);
  std::string out;
  out.reserve(body.size() + 512);
  size_t pos = 0;
  while (true) {
    const size_t open = body.find("{{", pos);
    if (open == std::string::npos) break;
    const size_t close = body.find("}}", open + 2);
    if (close == std::string::npos) break;
    out.append(body, pos, open - pos);
    const std::string name = body.substr(open + 2, close - open - 2);
    auto it = context.find(name);
    if (it == context.end()) throw RenderError(id, name);
    out += it->second;
    pos = close + 2;
  }
  out.append(body, pos, std::string::npos);
  return out;
}

}  // namespace aeroreact::llm
