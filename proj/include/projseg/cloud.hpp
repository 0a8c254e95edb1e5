#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace projseg {

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Point3&, const Point3&) = default;
};

struct PointAttributes {
  float intensity = 0.0f;
  std::array<float, 3> rgb{0.0f, 0.0f, 0.0f};
};

/// Semantic3D label: 0 = unlabeled, 1..8 = object classes.
using SemanticLabel = std::uint8_t;

inline constexpr SemanticLabel kUnlabeled = 0;
inline constexpr int kNumClasses = 8;
inline constexpr SemanticLabel kMaxLabel = 8;

inline constexpr const char* kClassNames[kNumClasses] = {
    "man-made terrain", "natural terrain", "high vegetation", "low vegetation",
    "buildings",        "hard scape",      "scanning artifacts", "cars"};

/// Columnar point store. Coordinates, intensities and colors live in separate
/// arrays so the projection pass streams through memory linearly.
class PointCloud {
 public:
  PointCloud() = default;

  std::size_t size() const noexcept { return x_.size(); }
  bool empty() const noexcept { return x_.empty(); }

  void reserve(std::size_t n);
  void add(const Point3& p, const PointAttributes& attr = {});

  Point3 point(std::size_t i) const { return {x_[i], y_[i], z_[i]}; }
  PointAttributes attributes(std::size_t i) const { return {intensity_[i], rgb_[i]}; }

  const std::vector<double>& xs() const noexcept { return x_; }
  const std::vector<double>& ys() const noexcept { return y_; }
  const std::vector<double>& zs() const noexcept { return z_; }
  const std::vector<float>& intensities() const noexcept { return intensity_; }
  const std::vector<std::array<float, 3>>& colors() const noexcept { return rgb_; }

  bool has_labels() const noexcept { return labels_.has_value(); }
  const std::vector<SemanticLabel>& labels() const { return labels_.value(); }

  /// Throws DataError if the count differs from size() or a value exceeds 8.
  void set_labels(std::vector<SemanticLabel> labels);
  void clear_labels() noexcept { labels_.reset(); }

 private:
  std::vector<double> x_, y_, z_;
  std::vector<float> intensity_;
  std::vector<std::array<float, 3>> rgb_;
  std::optional<std::vector<SemanticLabel>> labels_;
};

}  // namespace projseg
