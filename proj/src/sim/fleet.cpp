#include "aeroreact/sim/fleet.hpp"

#include <cmath>

namespace aeroreact::sim {

FleetIndexError::FleetIndexError(int drone_id)
    : std::out_of_range("Drone " + std::to_string(drone_id) + " is not available in this fleet"),
      drone_id_(drone_id) {}

std::vector<DroneState> init_fleet(int n, double spacing) {
  if (n < 1) throw InvalidFleetError("fleet must contain at least one drone");
  if (!(spacing > 0.0) || !std::isfinite(spacing)) {
    throw InvalidFleetError("drone spacing must be a positive distance");
  }
  std::vector<DroneState> drones;
  drones.reserve(static_cast<size_t>(n));
  for (int i = 1; i <= n; ++i) {
    DroneState s;
    s.id = i;
    s.y = spacing * (i - 1);
    drones.push_back(s);
  }
  return drones;
}

Fleet::Fleet(int n, double spacing) : drones_(init_fleet(n, spacing)) {}

Fleet::Fleet(std::vector<DroneState> drones) : drones_(std::move(drones)) {
  if (drones_.empty()) throw InvalidFleetError("fleet must contain at least one drone");
  for (size_t i = 0; i < drones_.size(); ++i) {
    if (drones_[i].id != static_cast<int>(i) + 1) {
      throw InvalidFleetError("drone ids must be 1..n in order");
    }
  }
}

bool Fleet::contains(int drone_id) const { return drone_id >= 1 && drone_id <= size(); }

const DroneState& Fleet::drone(int drone_id) const {
  if (!contains(drone_id)) throw FleetIndexError(drone_id);
  return drones_[static_cast<size_t>(drone_id - 1)];
}

CommandResult Fleet::apply(int drone_id, const Command& command) {
  if (!contains(drone_id)) throw FleetIndexError(drone_id);
  command.validate();
  DroneState& current = drones_[static_cast<size_t>(drone_id - 1)];

  CommandResult result;
  switch (command.kind) {
    case CommandKind::takeoff: result = takeoff(current); break;
    case CommandKind::land: result = land(current); break;
    case CommandKind::move: result = move(current, *command.direction, *command.distance); break;
    case CommandKind::rotate: result = rotate(current, *command.angle); break;
    case CommandKind::move_gimbal: result = move_gimbal(current, *command.angle); break;
    case CommandKind::capture_image: result = capture_image(current); break;
  }
  if (result.success) {
    result.new_state.last_command = command;
    current = result.new_state;
  }
  return result;
}

Json Fleet::snapshot() const {
  Json arr = Json::array();
  for (const auto& d : drones_) arr.push_back(to_json(d));
  return {{"drones", std::move(arr)}};
}

Fleet Fleet::from_snapshot(const Json& snapshot) {
  std::vector<DroneState> drones;
  for (const auto& d : snapshot.at("drones")) drones.push_back(drone_from_json(d));
  return Fleet(std::move(drones));
}

}  // namespace aeroreact::sim
