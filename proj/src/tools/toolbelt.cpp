#include "aeroreact/tools/toolbelt.hpp"

#include <algorithm>
#include <array>
#include <sstream>

namespace aeroreact::tools {

namespace {

constexpr std::array<std::string_view, 3> kMethodNames = {"reacteval", "react", "act"};

std::vector<ToolSchema> base_tools() {
  const std::vector<std::string> directions = {"forward", "backward", "left", "right", "up", "down"};
  return {
      {"takeoff", "Take off and hover at 1 m altitude.", {}},
      {"land", "Land at the current x/y position.", {}},
      {"move",
       "Move relative to the current heading.",
       {{"direction", ParamType::string, directions, "forward, backward, left, right, up or down"},
        {"distance", ParamType::number, {}, "distance in meters"}}},
      {"rotate",
       "Rotate clockwise by the given angle (negative turns counter-clockwise).",
       {{"angle", ParamType::number, {}, "degrees"}}},
      {"move_gimbal",
       "Set the camera gimbal pitch; constrained to 0-90 degrees.",
       {{"angle", ParamType::number, {}, "degrees"}}},
      {"capture_image", "Capture an image with the drone camera.", {}},
      {"analyze_image", "Describe the drone's most recent image.", {}},
      {"analyze_gauges", "Read any gauge visible in the drone's most recent image.", {}},
  };
}

std::string_view to_string(ParamType t) { return t == ParamType::number ? "number" : "string"; }

ToolResult failure(const ToolCall& call, std::string message) {
  return {call.tool_name, false, std::move(message), std::monostate{}};
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

// The image an analysis tool works on: the drone's last capture, else what
// the camera sees right now.
ImageRef analysis_target(const ToolCall& call, World& world) {
  if (const ImageRef* last = world.captures.last(call.drone_id)) return *last;
  return world.scene.lookup(world.fleet.drone(call.drone_id));
}

std::string format_reading(const GaugeReading& r) {
  std::ostringstream os;
  os << "Gauge reading: " << sim::format_number(r.value);
  if (!r.units.empty()) os << ' ' << r.units;
  os << " (confidence " << sim::format_number(r.confidence) << ')';
  return os.str();
}

}  // namespace

std::string_view to_string(Method method) { return kMethodNames[static_cast<size_t>(method)]; }

std::optional<Method> parse_method(std::string_view name) {
  for (size_t i = 0; i < kMethodNames.size(); ++i) {
    if (kMethodNames[i] == name) return static_cast<Method>(i);
  }
  return std::nullopt;
}

Json ToolSchema::to_json() const {
  Json properties = Json::object();
  Json required = Json::array();
  for (const auto& p : params) {
    Json prop{{"type", to_string(p.type)}, {"description", p.description}};
    if (!p.choices.empty()) prop["enum"] = p.choices;
    properties[p.name] = std::move(prop);
    required.push_back(p.name);
  }
  return {{"name", name},
          {"description", description},
          {"parameters",
           {{"type", "object"}, {"properties", std::move(properties)}, {"required", std::move(required)}}}};
}

std::vector<ToolSchema> list_tools(Method method) {
  auto tools = base_tools();
  if (method == Method::act) {
    tools.push_back({std::string(kTerminateTool), "End the current task once the plan is complete.", {}});
  }
  return tools;
}

const ToolSchema* find_tool(Method method, std::string_view name) {
  static const std::array<std::vector<ToolSchema>, 3> registries = {
      list_tools(Method::reacteval), list_tools(Method::react), list_tools(Method::act)};
  const auto& tools = registries[static_cast<size_t>(method)];
  auto it = std::find_if(tools.begin(), tools.end(), [&](const ToolSchema& t) { return t.name == name; });
  return it == tools.end() ? nullptr : &*it;
}

Json tool_schema_document(Method method) {
  Json tools = Json::array();
  for (const auto& t : list_tools(method)) tools.push_back(t.to_json());
  return {{"method", to_string(method)}, {"tools", std::move(tools)}};
}

std::optional<std::string> ToolResult::image() const {
  if (const auto* img = std::get_if<ImageRef>(&payload)) return img->image;
  if (const auto* a = std::get_if<AnalysisText>(&payload)) return a->image;
  if (const auto* g = std::get_if<GaugeResult>(&payload)) return g->image;
  return std::nullopt;
}

Json ToolResult::to_json() const {
  Json j{{"tool", tool_name}, {"success", success}, {"message", message}};
  struct Visitor {
    Json operator()(std::monostate) const { return nullptr; }
    Json operator()(const ImageRef& i) const {
      return {{"type", "image"}, {"image", i.image}, {"object", i.object}};
    }
    Json operator()(const AnalysisText& a) const {
      return {{"type", "analysis"}, {"text", a.text}, {"image", a.image}};
    }
    Json operator()(const GaugeResult& g) const {
      return {{"type", "gauge"},
              {"value", g.reading.value},
              {"units", g.reading.units},
              {"confidence", g.reading.confidence},
              {"image", g.image}};
    }
    Json operator()(const EndSignal&) const { return {{"type", "end"}}; }
  };
  Json payload_json = std::visit(Visitor{}, payload);
  if (!payload_json.is_null()) j["payload"] = std::move(payload_json);
  return j;
}

ToolResult ToolResult::from_json(const Json& j) {
  ToolResult r;
  r.tool_name = j.at("tool").get<std::string>();
  r.success = j.at("success").get<bool>();
  r.message = j.value("message", "");
  if (j.contains("payload") && j["payload"].is_object()) {
    const auto& p = j["payload"];
    const std::string type = p.value("type", "");
    if (type == "image") {
      r.payload = ImageRef{p.value("image", ""), p.value("object", ""), ""};
    } else if (type == "analysis") {
      r.payload = AnalysisText{p.value("text", ""), p.value("image", "")};
    } else if (type == "gauge") {
      r.payload = GaugeResult{{p.value("value", 0.0), p.value("units", ""), p.value("confidence", 1.0)},
                              p.value("image", "")};
    } else if (type == "end") {
      r.payload = EndSignal{};
    }
  }
  return r;
}

const ImageRef* CaptureLog::last(int drone_id) const {
  auto it = last_.find(drone_id);
  return it == last_.end() ? nullptr : &it->second;
}

std::vector<std::string> validate_parameters(const ToolSchema& schema, const Json& parameters) {
  std::vector<std::string> problems;
  if (!parameters.is_object()) {
    problems.push_back("parameters must be an object");
    return problems;
  }
  for (const auto& p : schema.params) {
    if (!parameters.contains(p.name)) {
      problems.push_back("missing '" + p.name + "'");
      continue;
    }
    const Json& v = parameters[p.name];
    if (p.type == ParamType::number && !v.is_number()) {
      problems.push_back("'" + p.name + "' must be a number");
    } else if (p.type == ParamType::string) {
      if (!v.is_string()) {
        problems.push_back("'" + p.name + "' must be a string");
      } else if (!p.choices.empty() &&
                 std::find(p.choices.begin(), p.choices.end(), v.get<std::string>()) == p.choices.end()) {
        problems.push_back("'" + p.name + "' must be one of " + join(p.choices, "/"));
      }
    }
  }
  for (const auto& [key, value] : parameters.items()) {
    const bool declared = std::any_of(schema.params.begin(), schema.params.end(),
                                      [&](const ParamSpec& p) { return p.name == key; });
    if (!declared) problems.push_back("unexpected parameter '" + key + "'");
  }
  return problems;
}

ToolResult invoke(const ToolCall& call, Method method, World& world) {
  const ToolSchema* schema = find_tool(method, call.tool_name);
  if (!schema) return failure(call, "Unknown tool: " + call.tool_name);
  // Resolve the drone first so a bad index surfaces regardless of parameters.
  const sim::DroneState& drone = world.fleet.drone(call.drone_id);

  if (auto problems = validate_parameters(*schema, call.parameters); !problems.empty()) {
    return failure(call, "Invalid parameters for " + call.tool_name + ": " + join(problems, "; "));
  }

  const std::string& name = call.tool_name;
  if (name == kTerminateTool) return {name, true, "Task terminated", EndSignal{}};

  if (name == "analyze_image") {
    const ImageRef target = analysis_target(call, world);
    std::string text = world.vision.describe(target);
    return {name, true, text, AnalysisText{text, target.image}};
  }
  if (name == "analyze_gauges") {
    const ImageRef target = analysis_target(call, world);
    auto reading = world.vision.read_gauge(target);
    if (!reading) return failure(call, "No gauge detected in " + target.image);
    return {name, true, format_reading(*reading), GaugeResult{*reading, target.image}};
  }

  sim::Command command;
  command.kind = *sim::parse_command_kind(name);
  const Json& p = call.parameters;
  if (p.contains("direction")) command.direction = sim::parse_direction(p["direction"].get<std::string>());
  if (p.contains("distance")) command.distance = p["distance"].get<double>();
  if (p.contains("angle")) command.angle = p["angle"].get<double>();

  sim::CommandResult outcome;
  try {
    outcome = world.fleet.apply(call.drone_id, command);
  } catch (const sim::ValidationError& e) {
    return failure(call, "Invalid parameters for " + name + ": " + e.what());
  }
  if (!outcome.success) return failure(call, outcome.message);

  if (command.kind == sim::CommandKind::capture_image) {
    ImageRef image = world.scene.lookup(drone);
    world.captures.record(call.drone_id, image);
    return {name, true, outcome.message, std::move(image)};
  }
  return {name, true, outcome.message, std::monostate{}};
}

}  // namespace aeroreact::tools
