#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "projseg/cloud.hpp"
#include "projseg/scoring.hpp"
#include "projseg/splat.hpp"

namespace projseg {

enum class FusionMode {
  Weighted,  ///< each membership adds m * score
  Uniform,   ///< each membership adds score (m = 1)
};

enum class Fallback {
  Nearest,    ///< label of the nearest visible point
  Unlabeled,  ///< 0
};

/// Running per-point class score sums over the 8 object classes.
struct PointScores {
  std::vector<std::array<double, kNumClasses>> sums;
  std::vector<std::uint32_t> visits;  ///< pixel memberships received

  PointScores() = default;
  explicit PointScores(std::size_t points) : sums(points), visits(points, 0) {}
  std::size_t size() const noexcept { return sums.size(); }
};

/// Adds one view's scores onto the points recorded in its memberships. The
/// background channel is never accumulated.
void backproject(const MembershipMap& memberships, const ScoreMap& scores, PointScores& acc,
                 FusionMode mode = FusionMode::Weighted);

/// Argmax of the summed scores for visible points (ties to the smaller class);
/// never-visible points are resolved by `fallback`. `cloud` supplies the
/// coordinates for Fallback::Nearest.
std::vector<SemanticLabel> assign_labels(const PointScores& acc, Fallback fallback, const PointCloud& cloud);

}  // namespace projseg
