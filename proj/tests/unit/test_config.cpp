#include "doctest.h"

#include <sstream>

#include "projseg/config.hpp"
#include "projseg/error.hpp"

using namespace projseg;

namespace {

PipelineConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

}  // namespace

TEST_CASE("defaults") {
  const auto cfg = parse("paths.points = a.txt\n");
  CHECK(cfg.points_path == "a.txt");
  CHECK(cfg.angles_per_orbit == 30);
  CHECK(cfg.pitch_deg == std::vector<double>{-15, 0, 15, 30});
  CHECK(cfg.camera.width == 512);
  CHECK(cfg.camera.fx == 256.0);
  CHECK(cfg.splat.proximity_weight == 0.5);
  CHECK(cfg.filter.min_coverage == 0.05);
  CHECK(cfg.scorer == ScorerKind::Baseline);
  CHECK(cfg.fusion == FusionMode::Weighted);
  CHECK(cfg.fallback == Fallback::Nearest);
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("values, comments and automatic intrinsics") {
  const auto cfg = parse(
      "# run\n"
      "paths.points = scene points.txt   # spaces kept inside\n"
      "camera.width = 256\n"
      "camera.height = 128\n"
      "camera.fy = 100\n"
      "orbit.center = 1 2 3\n"
      "orbit.pitch_deg = -10, 20\n"
      "splat.proximity_weight = 1.5\n"
      "fusion.mode = uniform\n"
      "fusion.fallback = unlabeled\n");
  CHECK(cfg.points_path == "scene points.txt");
  CHECK(cfg.camera.fx == 128.0);
  CHECK(cfg.camera.fy == 100.0);
  CHECK(cfg.camera.cy == 64.0);
  CHECK(cfg.orbit_center->z == 3.0);
  CHECK(cfg.offsets.size() == 2);
  CHECK(cfg.splat.proximity_weight == 1.5);
  CHECK(cfg.fusion == FusionMode::Uniform);
  CHECK(cfg.fallback == Fallback::Unlabeled);
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("bad configurations") {
  CHECK_THROWS_AS(parse("nosuch.key = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse("orbit.angles = many\n"), ConfigError);
  CHECK_THROWS_AS(parse("just text\n"), ConfigError);
  CHECK_THROWS_AS(parse("splat.sigma = nan\n"), ConfigError);
  CHECK_THROWS_AS(parse("fusion.mode = max\n"), ConfigError);
  CHECK_THROWS_AS(parse("orbit.center = 1 2\n"), ConfigError);
  CHECK_THROWS_AS(parse("").validate(), ConfigError);
  CHECK_THROWS_AS(parse("paths.points = a\norbit.pitch_deg = 0, 10\norbit.offset = 0 0 1\n").validate(), ConfigError);
  CHECK_THROWS_AS(parse("paths.points = a\nscorer.kind = external\n").validate(), ConfigError);
  CHECK_THROWS_AS(parse("paths.points = a\nfilter.min_coverage = 2\n").validate(), ConfigError);
  CHECK_THROWS_AS(parse("paths.points = a\nmodalities.jet_max = -1\n").validate(), ConfigError);
}

TEST_CASE("resolved form reproduces the configuration") {
  const auto cfg = parse(
      "paths.points = p.txt\npaths.labels = l.labels\norbit.angles = 7\n"
      "orbit.pitch_deg = 0.1, -3\norbit.offset = 0 0 0.3, 1 -1 0\n"
      "splat.depth_kernel_width = 0.3333333333333333\nscorer.kind = external\n"
      "scorer.command = run {rgb} {out}\nscorer.timeout = 9\nrun.jobs = 2\n");
  const auto text = format_config(cfg);
  const auto again = parse(text);
  CHECK(format_config(again) == text);
  CHECK(again.splat.depth_kernel_width == cfg.splat.depth_kernel_width);
  CHECK(again.offsets[1] == cfg.offsets[1]);
  CHECK(again.external.command == "run {rgb} {out}");
  CHECK_FALSE(again.orbit_center);
}

TEST_CASE("orbit center defaults to the bounding-box center") {
  auto cfg = parse("paths.points = p\norbit.pitch_deg = 0\n");
  PointCloud cloud;
  cloud.add({0, 0, 0});
  cloud.add({4, 2, -2});
  const auto spec = cfg.orbit_spec(cloud);
  CHECK(spec.center == Point3{2, 1, -1});
  CHECK(spec.orbits.size() == 1);
  CHECK(cfg.orbit_spec(PointCloud{}).center == Point3{});
  cfg.orbit_center = Point3{5, 5, 5};
  CHECK(cfg.orbit_spec(cloud).center == Point3{5, 5, 5});
}
