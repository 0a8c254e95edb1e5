#include "projseg/camera.hpp"

#include <cmath>
#include <string>

#include <Eigen/LU>

#include "projseg/error.hpp"

namespace projseg {

CameraIntrinsics CameraIntrinsics::centered(int width, int height) {
  CameraIntrinsics K;
  K.width = width;
  K.height = height;
  K.fx = K.fy = 0.5 * static_cast<double>(width);
  K.cx = 0.5 * static_cast<double>(width);
  K.cy = 0.5 * static_cast<double>(height);
  return K;
}

void CameraIntrinsics::validate() const {
  if (width < 1 || height < 1) throw ConfigError("camera size must be at least 1x1");
  if (!(fx > 0.0) || !(fy > 0.0)) throw ConfigError("focal lengths must be positive");
  if (!(cx >= 0.0 && cx < width) || !(cy >= 0.0 && cy < height)) {
    throw ConfigError("principal point must lie inside the image");
  }
}

void CameraPose::validate() const {
  if (!rotation.allFinite() || !translation.allFinite()) throw ConfigError("non-finite camera pose");
  const double ortho = (rotation.transpose() * rotation - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  if (ortho > 1e-9) throw ConfigError("rotation is not orthonormal");
  if (std::abs(rotation.determinant() - 1.0) > 1e-9) throw ConfigError("rotation determinant is not +1");
}

std::optional<Projection> project_point(const Point3& p, const CameraPose& pose,
                                        const CameraIntrinsics& K) {
  const Eigen::Vector3d pc = pose.rotation * Eigen::Vector3d(p.x, p.y, p.z) + pose.translation;
  if (!(pc.z() > 0.0)) return std::nullopt;
  Projection out;
  out.pixel = {K.fx * pc.x() / pc.z() + K.cx, K.fy * pc.y() / pc.z() + K.cy};
  out.depth = pc.z();
  return out;
}

}  // namespace projseg
