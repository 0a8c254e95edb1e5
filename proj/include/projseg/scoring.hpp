#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "projseg/modalities.hpp"
#include "projseg/raster.hpp"
#include "projseg/splat.hpp"

namespace projseg {

/// Score channels: classes 1..8 at indices 0..7, background at index 8.
inline constexpr int kScoreChannels = 9;
inline constexpr int kBackgroundChannel = 8;
/// Stand-in for minus infinity that stays finite through summation.
inline constexpr float kAbsentScore = -1e30f;

/// Channel of a label-image value; nothing for unlabeled pixels.
std::optional<int> label_to_channel(std::uint8_t label_value);

/// H x W x C raw per-pixel class scores, pixel-major then channel.
struct ScoreMap {
  int height = 0;
  int width = 0;
  int channels = kScoreChannels;
  std::vector<float> data;

  ScoreMap() = default;
  ScoreMap(int h, int w, int c = kScoreChannels, float fill = 0.0f)
      : height(h), width(w), channels(c), data(static_cast<std::size_t>(h) * w * c, fill) {}

  std::size_t pixel_count() const noexcept { return static_cast<std::size_t>(height) * width; }
  float& at(std::size_t pixel, int ch) { return data[pixel * channels + ch]; }
  float at(std::size_t pixel, int ch) const { return data[pixel * channels + ch]; }
};

// SPSC: "SPSC", u32 version = 1, u32 H, u32 W, u32 C, H*W*C f32 (little-endian).
void write_scores(std::ostream& out, const ScoreMap& scores);
ScoreMap read_scores(std::istream& in);
void save_scores(const std::string& path, const ScoreMap& scores);
ScoreMap load_scores(const std::string& path);

/// The per-view images a scorer consumes.
struct ViewModalities {
  Image<std::uint8_t> rgb;     ///< H x W x 3
  Image<std::uint8_t> jet;     ///< H x W x 3
  Image<std::uint8_t> normal;  ///< H x W x 3, encoded (n + 1) / 2 * 255
  DepthImage depth;            ///< coverage source
  std::optional<Image<std::uint8_t>> labels;

  int height() const noexcept { return depth.height(); }
  int width() const noexcept { return depth.width(); }
  bool covered(std::size_t pixel) const { return !is_empty_depth(depth.data()[pixel]); }
};

struct ModalityOptions {
  double jet_min = 0.0;
  double jet_max = 100.0;
  NormalOptions normals;
};

ViewModalities make_modalities(const RenderedView& view, const ModalityOptions& options);

inline constexpr int kFeatureDims = 9;
using FeatureVector = std::array<double, kFeatureDims>;

/// rgb, jet, normal bytes of one pixel; zeros where the pixel is empty.
FeatureVector pixel_features(const ViewModalities& view, std::size_t pixel);

/// Nearest-centroid classifier over the 9-D per-pixel feature vector.
struct BaselineModel {
  std::array<FeatureVector, kScoreChannels> centroids{};
  std::array<std::uint64_t, kScoreChannels> counts{};

  bool present(int channel) const { return counts[static_cast<std::size_t>(channel)] > 0; }
};

/// Accumulates per-class feature sums one view at a time.
class BaselineTrainer {
 public:
  void add(const ViewModalities& view);
  /// Throws DataError when no pixel labeled 1..8 was seen.
  BaselineModel finish() const;

 private:
  std::array<FeatureVector, kScoreChannels> sums_{};
  std::array<std::uint64_t, kScoreChannels> counts_{};
};

/// Centroid of each label-image class; background comes from empty pixels.
/// Throws DataError when no view carries a single pixel labeled 1..8.
BaselineModel train_baseline(std::span<const ViewModalities> views);

ScoreMap score_view_baseline(const BaselineModel& model, const ViewModalities& view);

void save_model(const std::string& path, const BaselineModel& model);
BaselineModel load_model(const std::string& path);

}  // namespace projseg
