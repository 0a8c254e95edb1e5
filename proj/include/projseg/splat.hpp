#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "projseg/camera.hpp"
#include "projseg/cloud.hpp"
#include "projseg/raster.hpp"

namespace projseg {

/// Kernel and clustering parameters of the visibility-aware splatting.
struct SplatConfig {
  double sigma = 1.0;              ///< image-plane PSF std-dev, pixels
  double trunc_radius = 3.0;       ///< PSF support radius, pixels (strict <)
  double depth_kernel_width = 0.2; ///< depth KDE bandwidth s, meters
  double proximity_weight = 0.5;   ///< near-surface bonus D in s_k = v_k + D / d_k, meters
  double meanshift_tol = 1e-4;     ///< stop when |d^{n+1} - d^n| < tol, meters
  int meanshift_max_iters = 50;
  double cluster_merge_tol = 3e-4; ///< converged iterates closer than this form one cluster

  void validate() const;  // throws ConfigError
};

/// Unnormalized Gaussian exp(-d^2 / (2 s^2)); peak value 1.
inline double gaussian(double d, double s) {
  return std::exp(-(d * d) / (2.0 * s * s));
}

using PointIndex = std::uint32_t;

struct Contribution {
  PointIndex point = 0;
  double weight = 0.0;  ///< PSF weight w_ij
  double depth = 0.0;   ///< camera-space z_i
};

/// Per-pixel contributor lists (CSR, row-major pixel order).
struct PixelContributors {
  int height = 0;
  int width = 0;
  std::vector<std::size_t> offsets;  // pixel_count + 1
  std::vector<Contribution> entries;

  std::span<const Contribution> at(int row, int col) const {
    const std::size_t p = static_cast<std::size_t>(row) * width + col;
    return {entries.data() + offsets[p], offsets[p + 1] - offsets[p]};
  }
};

struct ClusterResult {
  std::vector<double> centers;    ///< ascending
  std::vector<double> densities;  ///< v_k, each in (0, 1]
  std::vector<double> scores;     ///< s_k = v_k + D / d_k
  std::size_t chosen = 0;
};

struct MeanShiftStats {
  std::size_t starts = 0;          ///< contributor starts (one per contributor)
  std::size_t iterated = 0;        ///< starts whose trajectory was actually run
  std::size_t max_iter_hits = 0;   ///< trajectories that stopped at meanshift_max_iters
};

struct Membership {
  PointIndex point = 0;
  float weight = 0.0f;  ///< w_ij * G(d_chosen - z_i, s)

  friend bool operator==(const Membership&, const Membership&) = default;
};

/// Point memberships per pixel (CSR, row-major pixel order).
struct MembershipMap {
  int height = 0;
  int width = 0;
  std::vector<std::uint64_t> offsets;  // pixel_count + 1
  std::vector<Membership> entries;

  std::span<const Membership> at(std::size_t pixel) const {
    return {entries.data() + offsets[pixel], static_cast<std::size_t>(offsets[pixel + 1] - offsets[pixel])};
  }
  std::size_t pixel_count() const noexcept { return static_cast<std::size_t>(height) * width; }

  friend bool operator==(const MembershipMap&, const MembershipMap&) = default;
};

/// Label-image value for pixels no point spreads into.
inline constexpr std::uint8_t kBackgroundLabel = 9;

struct PixelComposite {
  double depth = 0.0;
  std::array<double, 3> rgb{};
  std::vector<Membership> memberships;
};

struct RenderOptions {
  bool label_image = false;  ///< needs a labeled cloud
};

struct RenderStats {
  std::size_t covered_pixels = 0;
  std::size_t contributions = 0;
  std::size_t memberships = 0;
  MeanShiftStats meanshift;
};

struct RenderedView {
  CameraPose pose;
  CameraIntrinsics intrinsics;
  DepthImage depth;                     ///< H x W, NaN where empty
  Image<float> rgb;                     ///< H x W x 3 composited color, 0 where empty
  MembershipMap memberships;
  std::optional<Image<std::uint8_t>> labels;  ///< 0..8, or kBackgroundLabel where empty
  RenderStats stats;
};

/// Memberships below this weight are dropped.
inline constexpr double kMembershipFloor = 1e-12;

PixelContributors gather_contributions(const PointCloud& cloud, const CameraPose& pose,
                                       const CameraIntrinsics& K, const SplatConfig& cfg);

/// Depth modes reached by mean-shift started from every contributor depth.
/// Returned ascending; contributors may be in any order.
std::vector<double> meanshift_depths(std::span<const Contribution> contribs, const SplatConfig& cfg,
                                     MeanShiftStats* stats = nullptr);

ClusterResult cluster_scores(std::span<const double> centers, std::span<const Contribution> contribs,
                             const SplatConfig& cfg);

PixelComposite composite_pixel(std::span<const Contribution> contribs, double chosen_depth,
                               const SplatConfig& cfg, const PointCloud& cloud);

RenderedView render_view(const PointCloud& cloud, const CameraPose& pose, const CameraIntrinsics& K,
                         const SplatConfig& cfg, const RenderOptions& options = {});

}  // namespace projseg
