#include "doctest.h"

#include <chrono>
#include <filesystem>

#include "projseg/error.hpp"
#include "projseg/external_scorer.hpp"
#include "projseg/raster_io.hpp"
#include "support/scenes.hpp"

using namespace projseg;

namespace {

struct Scratch {
  std::filesystem::path dir = testing::temp_dir("external_scorer");
  ScorerInputs inputs;
  Scratch() {
    Image<std::uint8_t> img(4, 6, 3, 0);
    img.at(1, 1, 0) = 200;
    img.at(2, 2, 2) = 200;
    inputs = {(dir / "rgb image.png").string(), (dir / "jet.png").string(), (dir / "normal.png").string(),
              (dir / "out.spsc").string()};
    save_png(inputs.rgb, img);
    save_png(inputs.jet, img);
    save_png(inputs.normal, img);
  }
  ExternalScorerSpec spec(const std::string& mode, double timeout = 30.0) const {
    return {std::string("'") + FIXTURE_SCORER + "' " + mode + " {rgb} {jet} {normal} {out}", "", timeout};
  }
};

}  // namespace

TEST_CASE("placeholders become quoted paths") {
  const ScorerInputs in{"a b.png", "it's.png", "n.png", "o"};
  CHECK(substitute_placeholders("run {rgb} {jet} {normal} {out} {other}", in) ==
        "run 'a b.png' 'it'\\''s.png' 'n.png' 'o' {other}");
}

TEST_CASE("a well-behaved scorer is read back") {
  Scratch s;
  const auto scores = run_external_scorer(s.spec("color"), s.inputs, 4, 6, "view_000");
  CHECK(scores.height == 4);
  CHECK(scores.at(1 * 6 + 1, 0) == 1.0f);
  CHECK(scores.at(2 * 6 + 2, 4) == 1.0f);
  CHECK(scores.at(0, kBackgroundChannel) == 1.0f);
}

TEST_CASE("scorer failures map to distinct errors") {
  Scratch s;
  CHECK_THROWS_AS(run_external_scorer(s.spec("wide"), s.inputs, 4, 6, "v"), ScoreDimensionError);
  CHECK_THROWS_AS(run_external_scorer(s.spec("channels"), s.inputs, 4, 6, "v"), ScoreDimensionError);
  CHECK_THROWS_AS(run_external_scorer(s.spec("garbage"), s.inputs, 4, 6, "v"), ScorerOutputError);
  CHECK_THROWS_AS(run_external_scorer(s.spec("silent"), s.inputs, 4, 6, "v"), ScorerOutputError);
  try {
    run_external_scorer(s.spec("fail"), s.inputs, 4, 6, "view_007");
    FAIL("expected an exit error");
  } catch (const ScorerExitError& e) {
    CHECK(e.status() == 4);
    CHECK(std::string(e.what()).find("view_007") != std::string::npos);
  }
}

TEST_CASE("stale output does not mask a silent scorer") {
  Scratch s;
  run_external_scorer(s.spec("uniform"), s.inputs, 4, 6, "v");
  CHECK_THROWS_AS(run_external_scorer(s.spec("silent"), s.inputs, 4, 6, "v"), ScorerOutputError);
}

TEST_CASE("timeout kills the scorer and names the view") {
  Scratch s;
  const auto start = std::chrono::steady_clock::now();
  try {
    run_external_scorer(s.spec("sleep", 0.3), s.inputs, 4, 6, "view_042");
    FAIL("expected a timeout");
  } catch (const ScorerTimeoutError& e) {
    CHECK(std::string(e.what()).find("view_042") != std::string::npos);
  }
  CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(10));
}

TEST_CASE("working directory is honored") {
  Scratch s;
  ExternalScorerSpec spec{"test -f marker && cp '" + s.inputs.rgb + "' /dev/null && exit 5", s.dir.string(), 30};
  testing::write_file(s.dir / "marker", "");
  try {
    run_external_scorer(spec, s.inputs, 4, 6, "v");
    FAIL("expected an exit error");
  } catch (const ScorerExitError& e) {
    CHECK(e.status() == 5);
  }
}

TEST_CASE("scorer spec validation") {
  const ExternalScorerSpec blank{" ", "", 1};
  const ExternalScorerSpec no_time{"true", "", 0};
  CHECK_THROWS_AS(blank.validate(), ConfigError);
  CHECK_THROWS_AS(no_time.validate(), ConfigError);
}
