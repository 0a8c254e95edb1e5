#include "doctest.h"

#include <cmath>
#include <sstream>

#include "projseg/error.hpp"
#include "projseg/raster_io.hpp"
#include "support/scenes.hpp"

using namespace projseg;

TEST_CASE("depth round-trips bit-exactly, NaN included") {
  DepthImage d(3, 4, 1, kEmptyDepth);
  d.at(0, 0) = 1.25f;
  d.at(2, 3) = 1e-7f;
  std::stringstream buf;
  write_depth(buf, d);
  CHECK(buf.str().size() == 16 + 12 * 4);
  CHECK(buf.str().substr(0, 4) == "SPDZ");
  const auto back = read_depth(buf);
  CHECK(back.height() == 3);
  CHECK(back.width() == 4);
  CHECK(back.at(0, 0) == 1.25f);
  CHECK(back.at(2, 3) == 1e-7f);
  CHECK(is_empty_depth(back.at(1, 1)));
}

TEST_CASE("header is little-endian") {
  std::stringstream buf;
  write_depth(buf, DepthImage(2, 258, 1, 0.0f));
  const std::string s = buf.str();
  CHECK(static_cast<unsigned char>(s[4]) == 1);
  CHECK(static_cast<unsigned char>(s[8]) == 2);
  CHECK(static_cast<unsigned char>(s[12]) == 2);
  CHECK(static_cast<unsigned char>(s[13]) == 1);
}

TEST_CASE("corrupt rasters are rejected") {
  std::stringstream wrong_magic("XXXX");
  CHECK_THROWS_AS(read_depth(wrong_magic), DataError);

  std::stringstream buf;
  write_depth(buf, DepthImage(4, 4, 1, 1.0f));
  std::string s = buf.str();
  std::stringstream truncated(s.substr(0, s.size() - 3));
  CHECK_THROWS_AS(read_depth(truncated), DataError);
  s[4] = 2;
  std::stringstream version(s);
  CHECK_THROWS_AS(read_depth(version), DataError);
}

TEST_CASE("memberships round-trip") {
  MembershipMap m;
  m.height = 2;
  m.width = 2;
  m.offsets = {0, 2, 2, 3, 3};
  m.entries = {{7, 0.5f}, {1, 1.0f}, {123456, 1e-10f}};
  std::stringstream buf;
  write_memberships(buf, m);
  CHECK(buf.str().size() == 16 + 4 * 4 + 3 * 12);
  CHECK(read_memberships(buf) == m);
}

TEST_CASE("memberships with invalid weights are rejected") {
  MembershipMap m;
  m.height = 1;
  m.width = 1;
  m.offsets = {0, 1};
  m.entries = {{0, 0.0f}};
  std::stringstream buf;
  write_memberships(buf, m);
  CHECK_THROWS_AS(read_memberships(buf), DataError);
}

TEST_CASE("png round-trip for gray and rgb") {
  const auto dir = testing::temp_dir("raster_io");
  Image<std::uint8_t> rgb(5, 7, 3);
  for (std::size_t i = 0; i < rgb.data().size(); ++i) rgb.data()[i] = static_cast<std::uint8_t>(i * 37);
  save_png((dir / "a.png").string(), rgb);
  CHECK(load_png((dir / "a.png").string()) == rgb);

  Image<std::uint8_t> gray(3, 2, 1, 9);
  save_png((dir / "g.png").string(), gray);
  CHECK(load_png((dir / "g.png").string()) == gray);

  CHECK_THROWS_AS(save_png((dir / "x.png").string(), Image<std::uint8_t>(2, 2, 2)), DataError);
  testing::write_file(dir / "junk.png", "not a png");
  CHECK_THROWS_AS(load_png((dir / "junk.png").string()), DataError);
  CHECK_THROWS_AS(load_depth((dir / "missing.spdz").string()), DataError);
}

TEST_CASE("to_u8 rounds and clamps") {
  Image<float> f(1, 5, 1);
  f.data() = {-3.0f, 0.5f, 127.5f, 300.0f, std::nanf("")};
  const auto u = to_u8(f);
  CHECK(u.data() == std::vector<std::uint8_t>{0, 1, 128, 255, 0});
}
