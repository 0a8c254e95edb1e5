#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "projseg/camera.hpp"
#include "projseg/cloud.hpp"
#include "projseg/raster.hpp"
#include "projseg/splat.hpp"

namespace projseg {

struct OrbitRing {
  double pitch = 0.0;                                      ///< radians, positive looks up
  Eigen::Vector3d camera_offset = Eigen::Vector3d::Zero(); ///< meters, added to the orbit center
};

/// Cameras rotating 360 degrees about a vertical (world z) axis through
/// `center`, one ring per pitch/offset entry.
struct OrbitSpec {
  Point3 center;
  int angles_per_orbit = 30;
  std::vector<OrbitRing> orbits = default_rings();

  static std::vector<OrbitRing> default_rings();  // pitches -15, 0, 15, 30 degrees
  void validate() const;
};

/// Poses ordered ring-major; ring r, step k looks along yaw 2*pi*k/angles_per_orbit.
std::vector<CameraPose> plan_orbit_views(const OrbitSpec& spec);

/// Camera at `position` looking along the given yaw and pitch (world z up).
CameraPose look_from(const Eigen::Vector3d& position, double yaw, double pitch);

struct ViewFilterConfig {
  double near_depth_threshold = 5.0;  ///< meters
  double near_fraction_max = 0.10;    ///< of all pixels
  double min_coverage = 0.05;         ///< covered / all pixels

  void validate() const;
};

struct ViewVerdict {
  bool kept = false;
  std::string reason;        ///< "kept", "coverage" or "near"
  double coverage = 0.0;
  double near_fraction = 0.0;
};

/// Both fractions are measured over all pixels of the view. A pixel counts as
/// covered when its depth is not empty.
ViewVerdict evaluate_view(const DepthImage& depth, const ViewFilterConfig& cfg);

std::vector<std::size_t> filter_views(std::span<const RenderedView> views, const ViewFilterConfig& cfg);

}  // namespace projseg
