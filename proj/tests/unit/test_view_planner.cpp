#include "doctest.h"

#include <cmath>
#include <numbers>

#include <Eigen/LU>

#include "projseg/error.hpp"
#include "projseg/view_planner.hpp"

using namespace projseg;

namespace {

DepthImage depth_with(int side, int covered, int near) {
  DepthImage d(side, side, 1, kEmptyDepth);
  for (int i = 0; i < covered; ++i) d.data()[static_cast<std::size_t>(i)] = i < near ? 1.0f : 20.0f;
  return d;
}

}  // namespace

TEST_CASE("default orbit plans 4 rings of 30 views") {
  OrbitSpec spec;
  spec.center = {1.0, 2.0, 3.0};
  const auto poses = plan_orbit_views(spec);
  REQUIRE(poses.size() == 120);
  for (const auto& p : poses) {
    CHECK_NOTHROW(p.validate());
    CHECK((p.center() - Eigen::Vector3d(1, 2, 3)).norm() < 1e-12);
  }
  // Ring-major order: view 31 is ring 1 (pitch 0), yaw 12 degrees.
  const Eigen::Vector3d fwd = poses[31].rotation.row(2).transpose();
  const double yaw = 2.0 * std::numbers::pi / 30.0;
  CHECK((fwd - Eigen::Vector3d(std::cos(yaw), std::sin(yaw), 0.0)).norm() < 1e-12);
}

TEST_CASE("look_from keeps the image upright") {
  const auto pose = look_from({0, 0, 0}, 0.0, 0.0);
  // World +z (up) must land in the top half of the image: camera y < 0.
  const Eigen::Vector3d up = pose.rotation * Eigen::Vector3d(0, 0, 1);
  CHECK(up.y() == doctest::Approx(-1.0));
  // Positive pitch looks upward.
  const auto raised = look_from({0, 0, 0}, 0.7, 0.4);
  CHECK(raised.rotation(2, 2) == doctest::Approx(std::sin(0.4)));
  CHECK(raised.rotation.determinant() == doctest::Approx(1.0));
}

TEST_CASE("camera offsets shift a ring") {
  OrbitSpec spec;
  spec.angles_per_orbit = 3;
  spec.orbits = {{0.0, {0, 0, 2}}};
  const auto poses = plan_orbit_views(spec);
  REQUIRE(poses.size() == 3);
  CHECK((poses[2].center() - Eigen::Vector3d(0, 0, 2)).norm() < 1e-12);
}

TEST_CASE("orbit validation") {
  OrbitSpec spec;
  spec.angles_per_orbit = 0;
  CHECK_THROWS_AS(plan_orbit_views(spec), ConfigError);
  spec = {};
  spec.orbits = {{std::numbers::pi / 2, Eigen::Vector3d::Zero()}};
  CHECK_THROWS_AS(plan_orbit_views(spec), ConfigError);
  spec.orbits.clear();
  CHECK_THROWS_AS(plan_orbit_views(spec), ConfigError);
}

TEST_CASE("near-fraction boundary") {
  const ViewFilterConfig cfg;
  CHECK(evaluate_view(depth_with(10, 100, 10), cfg).kept);
  const auto over = evaluate_view(depth_with(10, 100, 11), cfg);
  CHECK_FALSE(over.kept);
  CHECK(over.reason == "near");
  CHECK(evaluate_view(depth_with(20, 400, 40), cfg).kept);
  CHECK_FALSE(evaluate_view(depth_with(20, 400, 41), cfg).kept);
}

TEST_CASE("near means strictly closer than the threshold") {
  DepthImage d(10, 10, 1, 5.0f);
  CHECK(evaluate_view(d, {}).kept);
  d.data()[0] = std::nextafter(5.0f, 0.0f);
  CHECK(evaluate_view(d, {}).near_fraction == doctest::Approx(0.01));
}

TEST_CASE("coverage boundary") {
  const ViewFilterConfig cfg;
  const auto exact = evaluate_view(depth_with(10, 5, 0), cfg);
  CHECK(exact.kept);
  CHECK(exact.coverage == 0.05);
  const auto under = evaluate_view(depth_with(10, 4, 0), cfg);
  CHECK_FALSE(under.kept);
  CHECK(under.reason == "coverage");
  CHECK(evaluate_view(depth_with(10, 0, 0), ViewFilterConfig{5.0, 0.1, 0.0}).reason == "coverage");
}

TEST_CASE("filter_views returns kept indices in order") {
  std::vector<RenderedView> views(3);
  views[0].depth = depth_with(10, 100, 0);
  views[1].depth = depth_with(10, 100, 50);
  views[2].depth = depth_with(10, 30, 0);
  CHECK(filter_views(views, {}) == std::vector<std::size_t>{0, 2});
  CHECK_THROWS_AS(filter_views(views, {5.0, 1.5, 0.05}), ConfigError);
}
