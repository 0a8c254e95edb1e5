#include "projseg/scoring.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "projseg/error.hpp"
#include "projseg/raster_io.hpp"

namespace projseg {

std::optional<int> label_to_channel(std::uint8_t label_value) {
  if (label_value == kBackgroundLabel) return kBackgroundChannel;
  if (label_value >= 1 && label_value <= kNumClasses) return label_value - 1;
  return std::nullopt;
}

void write_scores(std::ostream& out, const ScoreMap& scores) {
  out.write("SPSC", 4);
  le::put_u32(out, kRasterFormatVersion);
  le::put_u32(out, static_cast<std::uint32_t>(scores.height));
  le::put_u32(out, static_cast<std::uint32_t>(scores.width));
  le::put_u32(out, static_cast<std::uint32_t>(scores.channels));
  for (const float v : scores.data) le::put_f32(out, v);
  if (!out) throw DataError("SPSC write failure");
}

ScoreMap read_scores(std::istream& in) {
  char magic[4] = {};
  in.read(magic, 4);
  if (in.gcount() != 4 || std::memcmp(magic, "SPSC", 4) != 0) throw DataError("bad magic, expected SPSC");
  const auto version = le::get_u32(in);
  if (version != kRasterFormatVersion) throw DataError("SPSC: unsupported version " + std::to_string(version));
  const auto h = le::get_u32(in);
  const auto w = le::get_u32(in);
  const auto c = le::get_u32(in);
  if (h == 0 || w == 0 || c == 0 || h > (1u << 16) || w > (1u << 16) || c > 1024) {
    throw DataError("SPSC: implausible dimensions");
  }
  ScoreMap scores(static_cast<int>(h), static_cast<int>(w), static_cast<int>(c));
  for (auto& v : scores.data) {
    v = le::get_f32(in);
    if (!std::isfinite(v)) throw DataError("SPSC: non-finite score");
  }
  if (in.peek() != std::char_traits<char>::eof()) throw DataError("SPSC: trailing bytes");
  return scores;
}

void save_scores(const std::string& path, const ScoreMap& scores) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path + " for writing");
  write_scores(out, scores);
  out.close();
  if (!out) throw DataError("write failure on " + path);
}

ScoreMap load_scores(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  try {
    return read_scores(in);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

ViewModalities make_modalities(const RenderedView& view, const ModalityOptions& options) {
  ViewModalities m;
  m.depth = view.depth;
  m.rgb = to_u8(view.rgb);
  m.jet = depth_to_jet(view.depth, options.jet_min, options.jet_max);
  m.normal = encode_normals(normals_from_depth(view.depth, view.intrinsics, options.normals));
  m.labels = view.labels;
  return m;
}

FeatureVector pixel_features(const ViewModalities& view, std::size_t pixel) {
  FeatureVector f{};
  if (!view.covered(pixel)) return f;
  const auto rgb = view.rgb.pixel(pixel);
  const auto jet = view.jet.pixel(pixel);
  const auto nrm = view.normal.pixel(pixel);
  for (int k = 0; k < 3; ++k) {
    f[k] = rgb[k];
    f[3 + k] = jet[k];
    f[6 + k] = nrm[k];
  }
  return f;
}

namespace {

void check_shapes(const ViewModalities& v) {
  const auto same = [&](const Image<std::uint8_t>& img, int channels) {
    return img.height() == v.height() && img.width() == v.width() && img.channels() == channels;
  };
  if (!same(v.rgb, 3) || !same(v.jet, 3) || !same(v.normal, 3) ||
      (v.labels && !same(*v.labels, 1))) {
    throw DataError("modality images disagree in size");
  }
}

}  // namespace

void BaselineTrainer::add(const ViewModalities& view) {
  check_shapes(view);
  if (!view.labels) return;
  for (std::size_t p = 0; p < view.depth.pixel_count(); ++p) {
    const auto ch = label_to_channel(view.labels->data()[p]);
    if (!ch) continue;
    const auto f = pixel_features(view, p);
    for (int k = 0; k < kFeatureDims; ++k) sums_[*ch][k] += f[k];
    ++counts_[*ch];
  }
}

BaselineModel BaselineTrainer::finish() const {
  std::uint64_t labeled = 0;
  for (int c = 0; c < kNumClasses; ++c) labeled += counts_[c];
  if (labeled == 0) throw DataError("training views contain no labeled pixels");
  BaselineModel model;
  model.counts = counts_;
  for (int c = 0; c < kScoreChannels; ++c) {
    if (counts_[c] == 0) continue;
    for (int k = 0; k < kFeatureDims; ++k) model.centroids[c][k] = sums_[c][k] / static_cast<double>(counts_[c]);
  }
  return model;
}

BaselineModel train_baseline(std::span<const ViewModalities> views) {
  BaselineTrainer trainer;
  for (const auto& v : views) trainer.add(v);
  return trainer.finish();
}

ScoreMap score_view_baseline(const BaselineModel& model, const ViewModalities& view) {
  check_shapes(view);
  ScoreMap scores(view.height(), view.width(), kScoreChannels, kAbsentScore);
  for (std::size_t p = 0; p < scores.pixel_count(); ++p) {
    if (!view.covered(p)) {
      scores.at(p, kBackgroundChannel) = 0.0f;
      continue;
    }
    const auto f = pixel_features(view, p);
    for (int c = 0; c < kScoreChannels; ++c) {
      if (!model.present(c)) continue;
      double d2 = 0.0;
      for (int k = 0; k < kFeatureDims; ++k) {
        const double diff = f[k] - model.centroids[c][k];
        d2 += diff * diff;
      }
      scores.at(p, c) = static_cast<float>(-std::sqrt(d2));
    }
  }
  return scores;
}

void save_model(const std::string& path, const BaselineModel& model) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path + " for writing");
  out << "projseg-baseline-model 1\n";
  char buf[64];
  for (int c = 0; c < kScoreChannels; ++c) {
    out << "class " << c << ' ' << model.counts[c];
    for (const double v : model.centroids[c]) {
      std::snprintf(buf, sizeof(buf), " %.17g", v);
      out << buf;
    }
    out << '\n';
  }
  out.close();
  if (!out) throw DataError("write failure on " + path);
}

BaselineModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::string tag;
  int version = 0;
  if (!(in >> tag >> version) || tag != "projseg-baseline-model" || version != 1) {
    throw DataError(path + ": not a baseline model file");
  }
  BaselineModel model;
  for (int c = 0; c < kScoreChannels; ++c) {
    int idx = -1;
    if (!(in >> tag >> idx >> model.counts[c]) || tag != "class" || idx != c) {
      throw DataError(path + ": malformed class record " + std::to_string(c));
    }
    for (auto& v : model.centroids[c]) {
      if (!(in >> v) || !std::isfinite(v)) throw DataError(path + ": malformed centroid " + std::to_string(c));
    }
  }
  return model;
}

}  // namespace projseg
