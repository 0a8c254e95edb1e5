#pragma once

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace projseg {

/// Row-major, channel-interleaved H x W x C raster.
template <typename T>
class Image {
 public:
  Image() = default;
  Image(int height, int width, int channels, T fill = T{})
      : height_(height), width_(width), channels_(channels),
        data_(static_cast<std::size_t>(height) * width * channels, fill) {}

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  int channels() const noexcept { return channels_; }
  std::size_t pixel_count() const noexcept { return static_cast<std::size_t>(height_) * width_; }
  bool empty() const noexcept { return data_.empty(); }

  T& at(int row, int col, int ch = 0) { return data_[index(row, col, ch)]; }
  const T& at(int row, int col, int ch = 0) const { return data_[index(row, col, ch)]; }

  std::span<T> pixel(std::size_t flat) { return {data_.data() + flat * channels_, static_cast<std::size_t>(channels_)}; }
  std::span<const T> pixel(std::size_t flat) const {
    return {data_.data() + flat * channels_, static_cast<std::size_t>(channels_)};
  }

  std::vector<T>& data() noexcept { return data_; }
  const std::vector<T>& data() const noexcept { return data_; }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t index(int row, int col, int ch) const {
    assert(row >= 0 && row < height_ && col >= 0 && col < width_ && ch >= 0 && ch < channels_);
    return (static_cast<std::size_t>(row) * width_ + col) * channels_ + ch;
  }

  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::vector<T> data_;
};

/// Depth in meters; NaN marks an empty pixel.
using DepthImage = Image<float>;
using Rgb8Image = Image<std::uint8_t>;

inline constexpr float kEmptyDepth = std::numeric_limits<float>::quiet_NaN();

inline bool is_empty_depth(float d) noexcept { return d != d; }

}  // namespace projseg
