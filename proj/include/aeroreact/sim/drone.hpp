#pragma once

#include "aeroreact/json.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace aeroreact::sim {

enum class CommandKind { takeoff, land, move, rotate, move_gimbal, capture_image };
enum class Direction { forward, backward, left, right, up, down };

std::string_view to_string(CommandKind kind);
std::string_view to_string(Direction direction);
std::optional<CommandKind> parse_command_kind(std::string_view name);
std::optional<Direction> parse_direction(std::string_view name);

/// Thrown for commands whose fields do not fit their kind (missing distance,
/// negative distance, non-finite values).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Command {
  CommandKind kind = CommandKind::capture_image;
  std::optional<Direction> direction;
  std::optional<double> distance;
  std::optional<double> angle;

  static Command takeoff() { return {CommandKind::takeoff, {}, {}, {}}; }
  static Command land() { return {CommandKind::land, {}, {}, {}}; }
  static Command capture_image() { return {CommandKind::capture_image, {}, {}, {}}; }
  static Command move(Direction d, double meters) { return {CommandKind::move, d, meters, {}}; }
  static Command rotate(double degrees) { return {CommandKind::rotate, {}, {}, degrees}; }
  static Command move_gimbal(double degrees) { return {CommandKind::move_gimbal, {}, {}, degrees}; }

  /// Throws ValidationError when the fields required by `kind` are absent or invalid.
  void validate() const;

  bool operator==(const Command&) const = default;
};

struct DroneState {
  int id = 1;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double heading = 0.0;  // degrees, [0, 360), clockwise from +y
  double gimbal = 0.0;   // degrees, [0, 90]
  bool is_flying = false;
  std::optional<Command> last_command;

  bool operator==(const DroneState&) const = default;
};

struct CommandResult {
  bool success = false;
  std::string message;
  DroneState new_state;
};

// Per-kind state transitions. Failed commands return the input state untouched.
CommandResult takeoff(const DroneState& state);
CommandResult land(const DroneState& state);
CommandResult move(const DroneState& state, Direction direction, double distance);
CommandResult rotate(const DroneState& state, double angle);
CommandResult move_gimbal(const DroneState& state, double angle);
CommandResult capture_image(const DroneState& state);

/// Unit vector the drone faces in the horizontal plane: (sin h, cos h).
struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};
Vec2 forward_vector(double heading_deg);
Vec2 right_vector(double heading_deg);

double normalize_heading(double degrees);

/// Formats a length or angle the way tool messages print them ("4", "4.5").
std::string format_number(double value);

Json to_json(const Command& command);
Command command_from_json(const Json& j);
Json to_json(const DroneState& state);
DroneState drone_from_json(const Json& j);

}  // namespace aeroreact::sim
