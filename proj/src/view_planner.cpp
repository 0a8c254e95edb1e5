#include "projseg/view_planner.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Geometry>

#include "projseg/error.hpp"

namespace projseg {

std::vector<OrbitRing> OrbitSpec::default_rings() {
  std::vector<OrbitRing> rings;
  for (const double deg : {-15.0, 0.0, 15.0, 30.0}) {
    rings.push_back({deg * std::numbers::pi / 180.0, Eigen::Vector3d::Zero()});
  }
  return rings;
}

void OrbitSpec::validate() const {
  if (angles_per_orbit < 1) throw ConfigError("orbit: angles_per_orbit must be >= 1");
  if (orbits.empty()) throw ConfigError("orbit: at least one ring is required");
  for (const auto& r : orbits) {
    if (!std::isfinite(r.pitch) || !r.camera_offset.allFinite()) throw ConfigError("orbit: non-finite ring");
    if (std::abs(r.pitch) >= 0.5 * std::numbers::pi) throw ConfigError("orbit: |pitch| must be < 90 degrees");
  }
}

CameraPose look_from(const Eigen::Vector3d& position, double yaw, double pitch) {
  const double cy = std::cos(yaw), sy = std::sin(yaw);
  const double cp = std::cos(pitch), sp = std::sin(pitch);
  const Eigen::Vector3d forward(cy * cp, sy * cp, sp);
  const Eigen::Vector3d right(sy, -cy, 0.0);
  const Eigen::Vector3d down = forward.cross(right);
  CameraPose pose;
  pose.rotation.row(0) = right.transpose();
  pose.rotation.row(1) = down.transpose();
  pose.rotation.row(2) = forward.transpose();
  pose.translation = -pose.rotation * position;
  return pose;
}

std::vector<CameraPose> plan_orbit_views(const OrbitSpec& spec) {
  spec.validate();
  std::vector<CameraPose> poses;
  poses.reserve(spec.orbits.size() * static_cast<std::size_t>(spec.angles_per_orbit));
  const Eigen::Vector3d center(spec.center.x, spec.center.y, spec.center.z);
  for (const auto& ring : spec.orbits) {
    for (int k = 0; k < spec.angles_per_orbit; ++k) {
      const double yaw = 2.0 * std::numbers::pi * k / spec.angles_per_orbit;
      poses.push_back(look_from(center + ring.camera_offset, yaw, ring.pitch));
    }
  }
  return poses;
}

void ViewFilterConfig::validate() const {
  if (!(near_depth_threshold > 0.0)) throw ConfigError("filter: near_depth_threshold must be > 0");
  const auto frac = [](double f) { return f >= 0.0 && f <= 1.0; };
  if (!frac(near_fraction_max) || !frac(min_coverage)) throw ConfigError("filter: fractions must lie in [0,1]");
}

ViewVerdict evaluate_view(const DepthImage& depth, const ViewFilterConfig& cfg) {
  std::size_t covered = 0;
  std::size_t near = 0;
  for (const float d : depth.data()) {
    if (is_empty_depth(d)) continue;
    ++covered;
    if (d < cfg.near_depth_threshold) ++near;
  }
  ViewVerdict v;
  const double total = static_cast<double>(depth.pixel_count());
  v.coverage = total > 0 ? static_cast<double>(covered) / total : 0.0;
  v.near_fraction = total > 0 ? static_cast<double>(near) / total : 0.0;
  if (covered == 0 || v.coverage < cfg.min_coverage) {
    v.reason = "coverage";
  } else if (v.near_fraction > cfg.near_fraction_max) {
    v.reason = "near";
  } else {
    v.kept = true;
    v.reason = "kept";
  }
  return v;
}

std::vector<std::size_t> filter_views(std::span<const RenderedView> views, const ViewFilterConfig& cfg) {
  cfg.validate();
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < views.size(); ++i) {
    if (evaluate_view(views[i].depth, cfg).kept) kept.push_back(i);
  }
  return kept;
}

}  // namespace projseg
