#pragma once

#include "aeroreact/sim/drone.hpp"

#include "aeroreact/json.hpp"

#include <stdexcept>
#include <vector>

namespace aeroreact::sim {

class InvalidFleetError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a command targets a drone id the fleet does not have.
class FleetIndexError : public std::out_of_range {
 public:
  explicit FleetIndexError(int drone_id);
  int drone_id() const { return drone_id_; }

 private:
  int drone_id_;
};

/// Drone i (1-based) starts landed at (0, spacing * (i - 1), 0).
std::vector<DroneState> init_fleet(int n, double spacing);

/// Owns the state of every simulated drone. Not internally synchronized:
/// callers serialize mutations and hand out snapshots to readers.
class Fleet {
 public:
  Fleet(int n, double spacing);
  explicit Fleet(std::vector<DroneState> drones);

  /// Dispatches `command` to drone `drone_id`. On success the drone's state
  /// and last_command are replaced; on failure nothing changes.
  /// Throws FleetIndexError for unknown ids and ValidationError for malformed commands.
  CommandResult apply(int drone_id, const Command& command);

  const DroneState& drone(int drone_id) const;
  bool contains(int drone_id) const;
  int size() const { return static_cast<int>(drones_.size()); }
  const std::vector<DroneState>& drones() const { return drones_; }

  /// {"drones":[{id,x,y,z,heading,gimbal,is_flying,last_command}, ...]}
  Json snapshot() const;
  static Fleet from_snapshot(const Json& snapshot);

  bool operator==(const Fleet&) const = default;

 private:
  std::vector<DroneState> drones_;
};

}  // namespace aeroreact::sim
