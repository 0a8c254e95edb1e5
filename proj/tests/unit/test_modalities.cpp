#include "doctest.h"

#include <cmath>
#include <random>

#include <Eigen/Core>

#include "projseg/error.hpp"
#include "projseg/modalities.hpp"

using namespace projseg;

namespace {

// Depth image of the plane n.X = c seen through K (rays through pixel centers).
DepthImage plane_depth(const CameraIntrinsics& K, const Eigen::Vector3d& n, double c) {
  DepthImage d(K.height, K.width, 1, kEmptyDepth);
  for (int r = 0; r < K.height; ++r) {
    for (int col = 0; col < K.width; ++col) {
      const Eigen::Vector3d ray((col + 0.5 - K.cx) / K.fx, (r + 0.5 - K.cy) / K.fy, 1.0);
      d.at(r, col) = static_cast<float>(c / n.dot(ray));
    }
  }
  return d;
}

}  // namespace

TEST_CASE("fronto-parallel plane faces the camera") {
  const auto K = CameraIntrinsics::centered(8, 8);
  const auto n = normals_from_depth(DepthImage(8, 8, 1, 4.0f), K);
  for (std::size_t p = 0; p < n.pixel_count(); ++p) {
    CHECK(n.pixel(p)[2] == doctest::Approx(-1.0));
    CHECK(std::abs(n.pixel(p)[0]) < 1e-7);
  }
}

TEST_CASE("slanted plane normals match the analytic normal") {
  const auto K = CameraIntrinsics::centered(40, 30);
  const Eigen::Vector3d n = Eigen::Vector3d(0.3, -0.4, -1.0).normalized();
  const auto img = normals_from_depth(plane_depth(K, n, -6.0), K);
  for (std::size_t p = 0; p < img.pixel_count(); ++p) {
    const auto v = img.pixel(p);
    REQUIRE_FALSE(is_empty_normal(v));
    CHECK(std::abs(v[0] - n.x()) < 1e-3);
    CHECK(std::abs(v[1] - n.y()) < 1e-3);
    CHECK(std::abs(v[2] - n.z()) < 1e-3);
  }
}

TEST_CASE("pixels next to a depth jump or without neighbors stay empty") {
  const auto K = CameraIntrinsics::centered(6, 6);
  DepthImage d(6, 6, 1, 5.0f);
  for (int r = 0; r < 6; ++r)
    for (int c = 3; c < 6; ++c) d.at(r, c) = 9.0f;
  d.at(0, 0) = kEmptyDepth;
  d.at(1, 0) = kEmptyDepth;
  d.at(2, 1) = kEmptyDepth;
  d.at(2, 0) = 5.0f;  // no vertical neighbor
  d.at(3, 0) = kEmptyDepth;
  const auto n = normals_from_depth(d, K);
  CHECK(is_empty_normal(n.pixel(2 * 6 + 0)));
  CHECK(is_empty_normal(n.pixel(4 * 6 + 2)));
  CHECK(is_empty_normal(n.pixel(4 * 6 + 3)));
  CHECK_FALSE(is_empty_normal(n.pixel(4 * 6 + 1)));
  CHECK_FALSE(is_empty_normal(n.pixel(4 * 6 + 4)));
  CHECK(is_empty_normal(n.pixel(0)));
  // A larger threshold keeps the jump pixels.
  const auto loose = normals_from_depth(d, K, {.discontinuity = 10.0});
  CHECK_FALSE(is_empty_normal(loose.pixel(4 * 6 + 2)));
}

TEST_CASE("normals are unit length and face the camera") {
  std::mt19937 rng(1);
  std::uniform_real_distribution<float> z(3.0f, 3.5f);
  const auto K = CameraIntrinsics::centered(32, 32);
  DepthImage d(32, 32, 1);
  for (auto& v : d.data()) v = z(rng);
  const auto n = normals_from_depth(d, K);
  for (std::size_t p = 0; p < n.pixel_count(); ++p) {
    const auto v = n.pixel(p);
    if (is_empty_normal(v)) continue;
    const double len = std::sqrt(double(v[0]) * v[0] + double(v[1]) * v[1] + double(v[2]) * v[2]);
    CHECK(std::abs(len - 1.0) < 1e-6);
    CHECK(v[2] <= 0.0f);
  }
}

TEST_CASE("normal encoding") {
  NormalImage n(1, 2, 3, std::nanf(""));
  n.at(0, 1, 0) = 0.0f;
  n.at(0, 1, 1) = -1.0f;
  n.at(0, 1, 2) = 1.0f;
  const auto e = encode_normals(n);
  CHECK(e.data() == std::vector<std::uint8_t>{0, 0, 0, 128, 0, 255});
}

TEST_CASE("jet ramp") {
  const auto mid = jet_color(0.5);
  CHECK(mid[0] == doctest::Approx(0.5));
  CHECK(mid[1] == doctest::Approx(1.0));
  CHECK(mid[2] == doctest::Approx(0.5));
  CHECK(jet_color(0.0) == std::array<double, 3>{0.0, 0.0, 0.5});
  CHECK(jet_color(1.0) == std::array<double, 3>{0.5, 0.0, 0.0});
  CHECK(jet_color(-4.0) == jet_color(0.0));
  CHECK(jet_color(0.25) == std::array<double, 3>{0.0, 0.5, 1.0});
}

TEST_CASE("depth to jet") {
  DepthImage d(1, 4, 1);
  d.data() = {0.0f, 50.0f, 250.0f, kEmptyDepth};
  const auto j = depth_to_jet(d, 0.0, 100.0);
  CHECK(j.data() == std::vector<std::uint8_t>{0, 0, 128, 128, 255, 128, 128, 0, 0, 0, 0, 0});
  CHECK_THROWS_AS(depth_to_jet(d, 5.0, 5.0), ConfigError);
}
