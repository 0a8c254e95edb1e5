#pragma once

#include <optional>

#include <Eigen/Core>

#include "projseg/cloud.hpp"

namespace projseg {

/// Pinhole intrinsics. Pixel (col, row) covers [col, col+1) x [row, row+1);
/// its center sits at (col + 0.5, row + 0.5).
struct CameraIntrinsics {
  double fx = 256.0;
  double fy = 256.0;
  double cx = 256.0;
  double cy = 256.0;
  int width = 512;
  int height = 512;

  /// Square image with focal length = size/2 and centered principal point.
  static CameraIntrinsics centered(int width, int height);

  void validate() const;  // throws ConfigError
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
};

/// World-to-camera transform: p_cam = rotation * p_world + translation.
/// Camera axes: x right, y down, z forward.
struct CameraPose {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  void validate() const;  // orthonormal, det +1 within 1e-9
  Eigen::Vector3d center() const { return -rotation.transpose() * translation; }
};

struct Projection {
  Eigen::Vector2d pixel;  // continuous image coordinates
  double depth = 0.0;     // camera-space z, meters
};

/// Returns nothing for points at or behind the image plane. Results outside
/// the image are returned unchanged.
std::optional<Projection> project_point(const Point3& p, const CameraPose& pose,
                                        const CameraIntrinsics& K);

}  // namespace projseg
