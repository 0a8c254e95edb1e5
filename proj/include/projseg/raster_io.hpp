#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "projseg/raster.hpp"
#include "projseg/splat.hpp"

namespace projseg {

// Binary containers are little-endian: 4-byte magic, u32 version (= 1),
// u32 height, u32 width, then a row-major payload.
//   SPDZ: f32 depth per pixel, NaN = empty
//   SPIX: per pixel u32 count, then count x (u64 point index, f32 weight)

inline constexpr std::uint32_t kRasterFormatVersion = 1;

void write_depth(std::ostream& out, const DepthImage& depth);
DepthImage read_depth(std::istream& in);

void write_memberships(std::ostream& out, const MembershipMap& map);
MembershipMap read_memberships(std::istream& in);

void save_depth(const std::string& path, const DepthImage& depth);
DepthImage load_depth(const std::string& path);
void save_memberships(const std::string& path, const MembershipMap& map);
MembershipMap load_memberships(const std::string& path);

/// 8-bit PNG, 1 (gray) or 3 (RGB) channels.
void save_png(const std::string& path, const Image<std::uint8_t>& image);
Image<std::uint8_t> load_png(const std::string& path);

/// Rounds and clamps a float raster into 8 bits per channel.
Image<std::uint8_t> to_u8(const Image<float>& image);

namespace le {

void put_u32(std::ostream& out, std::uint32_t v);
void put_u64(std::ostream& out, std::uint64_t v);
void put_f32(std::ostream& out, float v);
std::uint32_t get_u32(std::istream& in);
std::uint64_t get_u64(std::istream& in);
float get_f32(std::istream& in);

void put_header(std::ostream& out, const char (&magic)[5], std::uint32_t height, std::uint32_t width);
/// Checks magic and version; returns {height, width}.
std::pair<std::uint32_t, std::uint32_t> get_header(std::istream& in, const char (&magic)[5]);

}  // namespace le

}  // namespace projseg
