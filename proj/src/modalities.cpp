#include "projseg/modalities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "projseg/error.hpp"

namespace projseg {

NormalImage normals_from_depth(const DepthImage& depth, const CameraIntrinsics& K, const NormalOptions& options) {
  K.validate();
  const int H = depth.height();
  const int W = depth.width();
  const float nan = std::numeric_limits<float>::quiet_NaN();
  NormalImage normals(H, W, 3, nan);

  const auto valid = [&](int r, int c) {
    return r >= 0 && r < H && c >= 0 && c < W && !is_empty_depth(depth.at(r, c));
  };
  const auto backproject = [&](int r, int c) {
    const double z = depth.at(r, c);
    return Eigen::Vector3d((c + 0.5 - K.cx) * z / K.fx, (r + 0.5 - K.cy) * z / K.fy, z);
  };

  for (int r = 0; r < H; ++r) {
    for (int c = 0; c < W; ++c) {
      if (!valid(r, c)) continue;
      const double z = depth.at(r, c);
      const bool left = valid(r, c - 1), right = valid(r, c + 1);
      const bool up = valid(r - 1, c), down = valid(r + 1, c);
      if (!(left || right) || !(up || down)) continue;

      const auto jump = [&](bool ok, int rr, int cc) {
        return ok && std::abs(depth.at(rr, cc) - z) > options.discontinuity;
      };
      if (jump(left, r, c - 1) || jump(right, r, c + 1) || jump(up, r - 1, c) || jump(down, r + 1, c)) continue;

      const Eigen::Vector3d p = backproject(r, c);
      const Eigen::Vector3d du = (right ? backproject(r, c + 1) : p) - (left ? backproject(r, c - 1) : p);
      const Eigen::Vector3d dv = (down ? backproject(r + 1, c) : p) - (up ? backproject(r - 1, c) : p);
      Eigen::Vector3d n = du.cross(dv);
      const double len = n.norm();
      if (!(len > 0.0)) continue;
      n /= len;
      if (n.z() > 0.0) n = -n;
      for (int ch = 0; ch < 3; ++ch) normals.at(r, c, ch) = static_cast<float>(n[ch]);
    }
  }
  return normals;
}

Image<std::uint8_t> encode_normals(const NormalImage& normals) {
  Image<std::uint8_t> out(normals.height(), normals.width(), 3, 0);
  for (std::size_t p = 0; p < normals.pixel_count(); ++p) {
    const auto n = normals.pixel(p);
    if (is_empty_normal(n)) continue;
    auto o = out.pixel(p);
    for (int ch = 0; ch < 3; ++ch) {
      const double v = std::clamp((static_cast<double>(n[ch]) + 1.0) * 0.5, 0.0, 1.0);
      o[ch] = static_cast<std::uint8_t>(std::lround(v * 255.0));
    }
  }
  return out;
}

std::array<double, 3> jet_color(double t) {
  t = std::clamp(t, 0.0, 1.0);
  const auto ramp = [](double x) { return std::clamp(1.5 - std::abs(x), 0.0, 1.0); };
  return {ramp(4.0 * t - 3.0), ramp(4.0 * t - 2.0), ramp(4.0 * t - 1.0)};
}

Image<std::uint8_t> depth_to_jet(const DepthImage& depth, double d_min, double d_max) {
  if (!(d_min < d_max)) throw ConfigError("jet range requires d_min < d_max");
  Image<std::uint8_t> out(depth.height(), depth.width(), 3, 0);
  const double span = d_max - d_min;
  for (std::size_t p = 0; p < depth.pixel_count(); ++p) {
    const float d = depth.data()[p];
    if (is_empty_depth(d)) continue;
    const auto rgb = jet_color((d - d_min) / span);
    auto o = out.pixel(p);
    for (int ch = 0; ch < 3; ++ch) o[ch] = static_cast<std::uint8_t>(std::lround(rgb[ch] * 255.0));
  }
  return out;
}

}  // namespace projseg
