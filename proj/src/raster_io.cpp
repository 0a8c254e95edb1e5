#include "projseg/raster_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

#include <png.h>

#include "projseg/error.hpp"

namespace projseg {

namespace le {

namespace {

template <typename T>
void put_bytes(std::ostream& out, T v) {
  std::array<char, sizeof(T)> b;
  for (std::size_t k = 0; k < sizeof(T); ++k) b[k] = static_cast<char>((v >> (8 * k)) & 0xFF);
  out.write(b.data(), b.size());
}

template <typename T>
T get_bytes(std::istream& in) {
  std::array<unsigned char, sizeof(T)> b;
  in.read(reinterpret_cast<char*>(b.data()), b.size());
  if (in.gcount() != static_cast<std::streamsize>(b.size())) throw DataError("truncated binary raster");
  T v = 0;
  for (std::size_t k = 0; k < sizeof(T); ++k) v |= static_cast<T>(b[k]) << (8 * k);
  return v;
}

}  // namespace

void put_u32(std::ostream& out, std::uint32_t v) { put_bytes(out, v); }
void put_u64(std::ostream& out, std::uint64_t v) { put_bytes(out, v); }
void put_f32(std::ostream& out, float v) { put_bytes(out, std::bit_cast<std::uint32_t>(v)); }
std::uint32_t get_u32(std::istream& in) { return get_bytes<std::uint32_t>(in); }
std::uint64_t get_u64(std::istream& in) { return get_bytes<std::uint64_t>(in); }
float get_f32(std::istream& in) { return std::bit_cast<float>(get_bytes<std::uint32_t>(in)); }

void put_header(std::ostream& out, const char (&magic)[5], std::uint32_t height, std::uint32_t width) {
  out.write(magic, 4);
  put_u32(out, kRasterFormatVersion);
  put_u32(out, height);
  put_u32(out, width);
}

std::pair<std::uint32_t, std::uint32_t> get_header(std::istream& in, const char (&magic)[5]) {
  char m[4] = {};
  in.read(m, 4);
  if (in.gcount() != 4 || std::memcmp(m, magic, 4) != 0) {
    throw DataError(std::string("bad magic, expected ") + magic);
  }
  const auto version = get_u32(in);
  if (version != kRasterFormatVersion) {
    throw DataError(std::string(magic) + ": unsupported version " + std::to_string(version));
  }
  const auto h = get_u32(in);
  const auto w = get_u32(in);
  if (h == 0 || w == 0 || h > (1u << 16) || w > (1u << 16)) {
    throw DataError(std::string(magic) + ": implausible size " + std::to_string(h) + "x" + std::to_string(w));
  }
  return {h, w};
}

}  // namespace le

void write_depth(std::ostream& out, const DepthImage& depth) {
  le::put_header(out, "SPDZ", static_cast<std::uint32_t>(depth.height()), static_cast<std::uint32_t>(depth.width()));
  for (const float d : depth.data()) le::put_f32(out, d);
  if (!out) throw DataError("SPDZ write failure");
}

DepthImage read_depth(std::istream& in) {
  const auto [h, w] = le::get_header(in, "SPDZ");
  DepthImage depth(static_cast<int>(h), static_cast<int>(w), 1);
  for (auto& d : depth.data()) d = le::get_f32(in);
  return depth;
}

void write_memberships(std::ostream& out, const MembershipMap& map) {
  le::put_header(out, "SPIX", static_cast<std::uint32_t>(map.height), static_cast<std::uint32_t>(map.width));
  for (std::size_t p = 0; p < map.pixel_count(); ++p) {
    const auto members = map.at(p);
    le::put_u32(out, static_cast<std::uint32_t>(members.size()));
    for (const auto& m : members) {
      le::put_u64(out, m.point);
      le::put_f32(out, m.weight);
    }
  }
  if (!out) throw DataError("SPIX write failure");
}

MembershipMap read_memberships(std::istream& in) {
  const auto [h, w] = le::get_header(in, "SPIX");
  MembershipMap map;
  map.height = static_cast<int>(h);
  map.width = static_cast<int>(w);
  map.offsets.reserve(map.pixel_count() + 1);
  map.offsets.push_back(0);
  for (std::size_t p = 0; p < map.pixel_count(); ++p) {
    const auto count = le::get_u32(in);
    for (std::uint32_t k = 0; k < count; ++k) {
      const auto idx = le::get_u64(in);
      const auto weight = le::get_f32(in);
      if (idx > std::numeric_limits<PointIndex>::max()) throw DataError("SPIX: point index out of range");
      if (!(weight > 0.0f) || !std::isfinite(weight)) throw DataError("SPIX: non-positive membership weight");
      map.entries.push_back({static_cast<PointIndex>(idx), weight});
    }
    map.offsets.push_back(map.entries.size());
  }
  return map;
}

namespace {

template <typename Fn>
void with_output(const std::string& path, Fn&& fn) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path + " for writing");
  fn(out);
  out.close();
  if (!out) throw DataError("write failure on " + path);
}

template <typename Fn>
auto with_input(const std::string& path, Fn&& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  try {
    return fn(in);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

}  // namespace

void save_depth(const std::string& path, const DepthImage& depth) {
  with_output(path, [&](std::ostream& out) { write_depth(out, depth); });
}

DepthImage load_depth(const std::string& path) {
  return with_input(path, [](std::istream& in) { return read_depth(in); });
}

void save_memberships(const std::string& path, const MembershipMap& map) {
  with_output(path, [&](std::ostream& out) { write_memberships(out, map); });
}

MembershipMap load_memberships(const std::string& path) {
  return with_input(path, [](std::istream& in) { return read_memberships(in); });
}

void save_png(const std::string& path, const Image<std::uint8_t>& image) {
  if (image.channels() != 1 && image.channels() != 3) throw DataError("png: only 1 or 3 channels supported");
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(image.width());
  png.height = static_cast<png_uint_32>(image.height());
  png.format = image.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&png, path.c_str(), 0, image.data().data(), 0, nullptr)) {
    const std::string msg = png.message;
    png_image_free(&png);
    throw DataError(path + ": png: " + msg);
  }
}

Image<std::uint8_t> load_png(const std::string& path) {
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&png, path.c_str())) {
    throw DataError(path + ": png: " + std::string(png.message));
  }
  const bool rgb = (png.format & PNG_FORMAT_FLAG_COLOR) != 0;
  png.format = rgb ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  Image<std::uint8_t> image(static_cast<int>(png.height), static_cast<int>(png.width), rgb ? 3 : 1);
  if (!png_image_finish_read(&png, nullptr, image.data().data(), 0, nullptr)) {
    const std::string msg = png.message;
    png_image_free(&png);
    throw DataError(path + ": png: " + msg);
  }
  return image;
}

Image<std::uint8_t> to_u8(const Image<float>& image) {
  Image<std::uint8_t> out(image.height(), image.width(), image.channels());
  std::transform(image.data().begin(), image.data().end(), out.data().begin(), [](float v) {
    if (!(v > 0.0f)) return std::uint8_t{0};
    return static_cast<std::uint8_t>(std::lround(std::min(v, 255.0f)));
  });
  return out;
}

}  // namespace projseg
