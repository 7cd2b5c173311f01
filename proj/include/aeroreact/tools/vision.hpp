#pragma once

#include "aeroreact/tools/scene.hpp"

#include <optional>
#include <string>

namespace aeroreact::tools {

/// Image-understanding backend used by analyze_image and analyze_gauges.
class VisionBackend {
 public:
  virtual ~VisionBackend() = default;

  virtual std::string describe(const ImageRef& image) = 0;

  /// Empty when no gauge is visible in the image.
  virtual std::optional<GaugeReading> read_gauge(const ImageRef& image) = 0;
};

/// Answers from the scene configuration: the description and reading stored
/// alongside each fixture image.
class ScriptedVision final : public VisionBackend {
 public:
  explicit ScriptedVision(const Scene& scene) : scene_(scene) {}

  std::string describe(const ImageRef& image) override;
  std::optional<GaugeReading> read_gauge(const ImageRef& image) override;

 private:
  const Scene& scene_;
};

}  // namespace aeroreact::tools
