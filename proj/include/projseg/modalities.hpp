#pragma once

#include <array>
#include <cstdint>

#include "projseg/camera.hpp"
#include "projseg/raster.hpp"

namespace projseg {

/// H x W x 3 unit normals in camera coordinates, facing the camera (n.z <= 0).
/// Empty pixels hold NaN in all three channels.
using NormalImage = Image<float>;

struct NormalOptions {
  /// A pixel whose 4-neighborhood contains a depth jump larger than this is
  /// left empty. Default is 10 x the default depth kernel width.
  double discontinuity = 2.0;
};

/// Back-projects every pixel center to camera space and crosses central
/// differences (one-sided where a neighbor is missing) of the horizontal and
/// vertical neighbors. A pixel without a usable neighbor in either direction
/// is left empty.
NormalImage normals_from_depth(const DepthImage& depth, const CameraIntrinsics& K,
                               const NormalOptions& options = {});

inline bool is_empty_normal(std::span<const float> n) { return n[0] != n[0]; }

/// Normals as 8-bit (n + 1) / 2 * 255; empty pixels become (0, 0, 0).
Image<std::uint8_t> encode_normals(const NormalImage& normals);

/// Classic 4-segment jet ramp: t = 0 is dark blue (0, 0, 0.5), passing through
/// cyan, green and yellow to dark red (0.5, 0, 0) at t = 1. Channels in [0, 1].
std::array<double, 3> jet_color(double t);

/// Jet encoding of depth clamped to [d_min, d_max]. Empty pixels map to black.
/// Throws ConfigError unless d_min < d_max.
Image<std::uint8_t> depth_to_jet(const DepthImage& depth, double d_min, double d_max);

}  // namespace projseg
