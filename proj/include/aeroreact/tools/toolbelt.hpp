#pragma once

#include "aeroreact/json.hpp"
#include "aeroreact/sim/fleet.hpp"
#include "aeroreact/tools/scene.hpp"
#include "aeroreact/tools/vision.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace aeroreact::tools {

/// Worker reasoning method; selects the tool registry.
enum class Method { reacteval, react, act };

std::string_view to_string(Method method);
std::optional<Method> parse_method(std::string_view name);

enum class ParamType { number, string };

struct ParamSpec {
  std::string name;
  ParamType type = ParamType::number;
  std::vector<std::string> choices;  // string enums only
  std::string description;
};

/// All declared parameters are required; undeclared keys are rejected.
struct ToolSchema {
  std::string name;
  std::string description;
  std::vector<ParamSpec> params;

  Json to_json() const;
};

inline constexpr std::string_view kTerminateTool = "terminate";

/// Drone and model tools for every method; `terminate` only for act.
std::vector<ToolSchema> list_tools(Method method);
const ToolSchema* find_tool(Method method, std::string_view name);

/// Schema document for the console's inspector.
Json tool_schema_document(Method method);

struct ToolCall {
  std::string tool_name;
  Json parameters = Json::object();
  int drone_id = 1;
};

struct AnalysisText {
  std::string text;
  std::string image;
};

struct GaugeResult {
  GaugeReading reading;
  std::string image;
};

struct EndSignal {
  bool operator==(const EndSignal&) const = default;
};

using Payload = std::variant<std::monostate, ImageRef, AnalysisText, GaugeResult, EndSignal>;

struct ToolResult {
  std::string tool_name;
  bool success = false;
  std::string message;
  Payload payload;

  bool is_end_signal() const { return std::holds_alternative<EndSignal>(payload); }
  /// Image the result refers to (capture, or the analyzed image), if any.
  std::optional<std::string> image() const;

  Json to_json() const;
  static ToolResult from_json(const Json& j);
};

/// Most recent capture per drone.
class CaptureLog {
 public:
  void record(int drone_id, ImageRef image) { last_[drone_id] = std::move(image); }
  const ImageRef* last(int drone_id) const;
  void clear() { last_.clear(); }

 private:
  std::map<int, ImageRef> last_;
};

/// Everything a tool call can touch.
struct World {
  sim::Fleet& fleet;
  const Scene& scene;
  VisionBackend& vision;
  CaptureLog& captures;
};

/// Validates and executes one tool call. Validation problems and unknown
/// tools come back as failed results; an unknown drone id throws
/// sim::FleetIndexError.
ToolResult invoke(const ToolCall& call, Method method, World& world);

/// Parameter problems for `call` against `schema`; empty when valid.
std::vector<std::string> validate_parameters(const ToolSchema& schema, const Json& parameters);

}  // namespace aeroreact::tools
