#include "aeroreact/sim/drone.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace aeroreact::sim {

namespace {

constexpr std::array<std::string_view, 6> kKindNames = {
    "takeoff", "land", "move", "rotate", "move_gimbal", "capture_image"};
constexpr std::array<std::string_view, 6> kDirectionNames = {
    "forward", "backward", "left", "right", "up", "down"};

CommandResult fail(const DroneState& state, std::string message) {
  return {false, std::move(message), state};
}

// sin/cos in degrees, exact on multiples of 90 so axis-aligned flights stay
// on integer coordinates.
std::pair<double, double> sincos_deg(double degrees) {
  const double h = normalize_heading(degrees);
  if (h == 0.0) return {0.0, 1.0};
  if (h == 90.0) return {1.0, 0.0};
  if (h == 180.0) return {0.0, -1.0};
  if (h == 270.0) return {-1.0, 0.0};
  const double rad = h * std::numbers::pi / 180.0;
  return {std::sin(rad), std::cos(rad)};
}

}  // namespace

std::string_view to_string(CommandKind kind) { return kKindNames[static_cast<size_t>(kind)]; }
std::string_view to_string(Direction direction) {
  return kDirectionNames[static_cast<size_t>(direction)];
}

std::optional<CommandKind> parse_command_kind(std::string_view name) {
  for (size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == name) return static_cast<CommandKind>(i);
  }
  return std::nullopt;
}

std::optional<Direction> parse_direction(std::string_view name) {
  for (size_t i = 0; i < kDirectionNames.size(); ++i) {
    if (kDirectionNames[i] == name) return static_cast<Direction>(i);
  }
  return std::nullopt;
}

void Command::validate() const {
  switch (kind) {
    case CommandKind::move:
      if (!direction) throw ValidationError("move requires a direction");
      if (!distance) throw ValidationError("move requires a distance");
      if (!std::isfinite(*distance) || *distance < 0.0) {
        throw ValidationError("move distance must be a finite value >= 0");
      }
      break;
    case CommandKind::rotate:
    case CommandKind::move_gimbal:
      if (!angle) throw ValidationError(std::string(to_string(kind)) + " requires an angle");
      if (!std::isfinite(*angle)) throw ValidationError("angle must be finite");
      break;
    default:
      break;
  }
}

double normalize_heading(double degrees) {
  double h = std::fmod(degrees, 360.0);
  if (h < 0.0) h += 360.0;
  if (h >= 360.0) h -= 360.0;
  return h + 0.0;  // no -0.0
}

Vec2 forward_vector(double heading_deg) {
  auto [s, c] = sincos_deg(heading_deg);
  return {s, c};
}

Vec2 right_vector(double heading_deg) {
  auto [s, c] = sincos_deg(heading_deg);
  return {c, -s};
}

std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", value);
  return buf;
}

CommandResult takeoff(const DroneState& state) {
  if (state.is_flying) return fail(state, "Takeoff failed: already flying");
  DroneState next = state;
  next.is_flying = true;
  next.z = 1.0;
  return {true, "Takeoff successful (simulated)", next};
}

CommandResult land(const DroneState& state) {
  if (!state.is_flying) return fail(state, "Landing failed: already landed");
  DroneState next = state;
  next.is_flying = false;
  next.z = 0.0;
  return {true, "Landing successful (simulated)", next};
}

CommandResult move(const DroneState& state, Direction direction, double distance) {
  if (!state.is_flying) return fail(state, "Move failed: drone not flying");
  DroneState next = state;
  const Vec2 fwd = forward_vector(state.heading);
  const Vec2 right = right_vector(state.heading);
  switch (direction) {
    case Direction::forward:
      next.x += distance * fwd.x;
      next.y += distance * fwd.y;
      break;
    case Direction::backward:
      next.x -= distance * fwd.x;
      next.y -= distance * fwd.y;
      break;
    case Direction::right:
      next.x += distance * right.x;
      next.y += distance * right.y;
      break;
    case Direction::left:
      next.x -= distance * right.x;
      next.y -= distance * right.y;
      break;
    case Direction::up:
      next.z += distance;
      break;
    case Direction::down:
      next.z -= distance;
      if (next.z < 0.0) return fail(state, "Move failed: below ground");
      break;
  }
  return {true, "Moved " + std::string(to_string(direction)) + " by " + format_number(distance) + "m",
          next};
}

CommandResult rotate(const DroneState& state, double angle) {
  if (!state.is_flying) return fail(state, "Rotate failed: drone not flying");
  DroneState next = state;
  next.heading = normalize_heading(state.heading + angle);
  return {true, "Rotated by " + format_number(angle) + " degrees", next};
}

CommandResult move_gimbal(const DroneState& state, double angle) {
  DroneState next = state;
  next.gimbal = std::clamp(angle, 0.0, 90.0);
  std::string message = "Gimbal set to " + format_number(next.gimbal) + " degrees";
  if (next.gimbal != angle) message += " (clamped from " + format_number(angle) + ")";
  return {true, message, next};
}

CommandResult capture_image(const DroneState& state) {
  return {true, "Image captured successfully", state};
}

Json to_json(const Command& command) {
  Json j{{"kind", to_string(command.kind)}};
  if (command.direction) j["direction"] = to_string(*command.direction);
  if (command.distance) j["distance"] = *command.distance;
  if (command.angle) j["angle"] = *command.angle;
  return j;
}

Command command_from_json(const Json& j) {
  Command c;
  const auto kind = parse_command_kind(j.at("kind").get<std::string>());
  if (!kind) throw ValidationError("unknown command kind: " + j.at("kind").get<std::string>());
  c.kind = *kind;
  if (j.contains("direction")) {
    c.direction = parse_direction(j["direction"].get<std::string>());
    if (!c.direction) throw ValidationError("unknown direction: " + j["direction"].get<std::string>());
  }
  if (j.contains("distance")) c.distance = j["distance"].get<double>();
  if (j.contains("angle")) c.angle = j["angle"].get<double>();
  return c;
}

Json to_json(const DroneState& s) {
  Json j;
  j["id"] = s.id;
  j["x"] = s.x;
  j["y"] = s.y;
  j["z"] = s.z;
  j["heading"] = s.heading;
  j["gimbal"] = s.gimbal;
  j["is_flying"] = s.is_flying;
  j["last_command"] = s.last_command ? to_json(*s.last_command) : Json(nullptr);
  return j;
}

DroneState drone_from_json(const Json& j) {
  DroneState s;
  s.id = j.at("id").get<int>();
  s.x = j.at("x").get<double>();
  s.y = j.at("y").get<double>();
  s.z = j.at("z").get<double>();
  s.heading = j.at("heading").get<double>();
  s.gimbal = j.at("gimbal").get<double>();
  s.is_flying = j.at("is_flying").get<bool>();
  if (j.contains("last_command") && !j["last_command"].is_null()) {
    s.last_command = command_from_json(j["last_command"]);
  }
  return s;
}

}  // namespace aeroreact::sim
