#include "doctest.h"

#include <cmath>

#include <Eigen/Geometry>

#include "projseg/camera.hpp"
#include "projseg/error.hpp"

using namespace projseg;

TEST_CASE("pinhole projection of a camera-frame point") {
  CameraIntrinsics K{100.0, 100.0, 50.0, 50.0, 100, 100};
  const auto p = project_point({1.0, 0.0, 2.0}, CameraPose{}, K);
  REQUIRE(p);
  CHECK(p->pixel.x() == doctest::Approx(100.0));
  CHECK(p->pixel.y() == doctest::Approx(50.0));
  CHECK(p->depth == 2.0);
}

TEST_CASE("points at or behind the camera do not project") {
  const CameraIntrinsics K;
  CHECK_FALSE(project_point({0, 0, 0}, CameraPose{}, K));
  CHECK_FALSE(project_point({1, 1, -3}, CameraPose{}, K));
  CHECK(project_point({1e4, 0, 1}, CameraPose{}, K));  // off-image still projects
}

TEST_CASE("pose transform and camera center") {
  CameraPose pose;
  pose.rotation = Eigen::AngleAxisd(0.3, Eigen::Vector3d(1, 2, 3).normalized()).toRotationMatrix();
  pose.translation = {0.5, -1.0, 4.0};
  const Eigen::Vector3d c = pose.center();
  CHECK((pose.rotation * c + pose.translation).norm() < 1e-12);
  CHECK_NOTHROW(pose.validate());
  pose.rotation(0, 0) += 1e-6;
  CHECK_THROWS_AS(pose.validate(), ConfigError);
  CameraPose mirror;
  mirror.rotation(2, 2) = -1.0;
  CHECK_THROWS_AS(mirror.validate(), ConfigError);
}

TEST_CASE("intrinsics validation") {
  CHECK_NOTHROW(CameraIntrinsics{}.validate());
  const auto c = CameraIntrinsics::centered(256, 256);
  CHECK(c.fx == 128.0);
  CHECK(c.cx == 128.0);
  CHECK(c.pixel_count() == 65536);
  CameraIntrinsics bad;
  bad.fx = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = {};
  bad.width = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}
