#include "aeroreact/tools/scene.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace aeroreact::tools {

bool in_facing_half_plane(const sim::DroneState& drone, double target_x, double target_y) {
  const sim::Vec2 fwd = sim::forward_vector(drone.heading);
  const double dot = fwd.x * (target_x - drone.x) + fwd.y * (target_y - drone.y);
  return dot > 1e-9;
}

Scene Scene::from_json(const Json& j) {
  const Json& list = j.is_object() && j.contains("objects") ? j["objects"] : j;
  if (!list.is_array()) throw std::invalid_argument("scene config must be a JSON array of objects");
  std::vector<SceneObject> objects;
  for (const auto& item : list) {
    SceneObject o;
    o.name = item.at("name").get<std::string>();
    const auto& pos = item.at("position");
    if (!pos.is_array() || pos.size() != 3) {
      throw std::invalid_argument("scene object '" + o.name + "' position must be [x, y, z]");
    }
    o.position = {pos[0].get<double>(), pos[1].get<double>(), pos[2].get<double>()};
    o.image = item.at("image").get<std::string>();
    o.description = item.value("description", "");
    if (item.contains("reading")) {
      const auto& r = item["reading"];
      GaugeReading g{r.at("value").get<double>(), r.value("units", ""), r.value("confidence", 1.0)};
      if (g.confidence < 0.0 || g.confidence > 1.0) {
        throw std::invalid_argument("scene object '" + o.name + "' reading confidence outside [0, 1]");
      }
      o.reading = g;
    }
    objects.push_back(std::move(o));
  }
  return Scene(std::move(objects));
}

Scene Scene::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scene config " + path.string());
  return from_json(Json::parse(in));
}

Json Scene::to_json() const {
  Json arr = Json::array();
  for (const auto& o : objects_) {
    Json j{{"name", o.name},
           {"position", {o.position.x, o.position.y, o.position.z}},
           {"image", o.image},
           {"description", o.description}};
    if (o.reading) {
      j["reading"] = {{"value", o.reading->value},
                      {"units", o.reading->units},
                      {"confidence", o.reading->confidence}};
    }
    arr.push_back(std::move(j));
  }
  return arr;
}

ImageRef Scene::lookup(const sim::DroneState& drone) const {
  const SceneObject* best = nullptr;
  double best_dist = std::numeric_limits<double>::infinity();
  for (const auto& o : objects_) {
    if (!in_facing_half_plane(drone, o.position.x, o.position.y)) continue;
    const double d = std::hypot(o.position.x - drone.x, o.position.y - drone.y, o.position.z - drone.z);
    if (d < best_dist) {
      best_dist = d;
      best = &o;
    }
  }
  if (!best) return {kEmptyRoomImage, "", "An empty indoor room with bare walls and no notable objects."};
  return {best->image, best->name, best->description};
}

const SceneObject* Scene::find(const std::string& name) const {
  for (const auto& o : objects_) {
    if (o.name == name) return &o;
  }
  return nullptr;
}

const SceneObject* Scene::find_by_image(const std::string& image) const {
  for (const auto& o : objects_) {
    if (o.image == image) return &o;
  }
  return nullptr;
}

}  // namespace aeroreact::tools
