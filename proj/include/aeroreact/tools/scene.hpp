#pragma once

#include "aeroreact/sim/drone.hpp"

#include "aeroreact/json.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace aeroreact::tools {

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

struct GaugeReading {
  double value = 0.0;
  std::string units;
  double confidence = 1.0;  // [0, 1]
};

struct SceneObject {
  std::string name;
  Point3 position;
  std::string image;
  std::string description;
  std::optional<GaugeReading> reading;
};

/// What a simulated camera resolved to.
struct ImageRef {
  std::string image;
  std::string object;  // empty for the default fixture
  std::string description;
};

inline constexpr const char* kEmptyRoomImage = "fixtures/empty_room.png";

/// True when `target` lies strictly in front of a drone with this heading,
/// judged in the horizontal plane.
bool in_facing_half_plane(const sim::DroneState& drone, double target_x, double target_y);

/// Declarative mapping from world positions to fixture images. Read-only after load.
class Scene {
 public:
  Scene() = default;
  explicit Scene(std::vector<SceneObject> objects) : objects_(std::move(objects)) {}

  static Scene from_json(const Json& j);
  static Scene load(const std::filesystem::path& path);
  Json to_json() const;

  /// Nearest object (3D distance) in the drone's facing half-plane, or the
  /// empty-room fixture when nothing is in view.
  ImageRef lookup(const sim::DroneState& drone) const;

  const SceneObject* find(const std::string& name) const;
  const SceneObject* find_by_image(const std::string& image) const;
  const std::vector<SceneObject>& objects() const { return objects_; }

 private:
  std::vector<SceneObject> objects_;
};

}  // namespace aeroreact::tools
