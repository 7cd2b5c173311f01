#include "aeroreact/tools/vision.hpp"

namespace aeroreact::tools {

std::string ScriptedVision::describe(const ImageRef& image) {
  if (const SceneObject* o = scene_.find_by_image(image.image)) return o->description;
  return image.description;
}

std::optional<GaugeReading> ScriptedVision::read_gauge(const ImageRef& image) {
  if (const SceneObject* o = scene_.find_by_image(image.image)) return o->reading;
  return std::nullopt;
}

}  // namespace aeroreact::tools
