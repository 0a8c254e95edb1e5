#include "projseg/fusion.hpp"

#include <algorithm>
#include <limits>

#include "projseg/error.hpp"

namespace projseg {

void backproject(const MembershipMap& memberships, const ScoreMap& scores, PointScores& acc, FusionMode mode) {
  if (scores.height != memberships.height || scores.width != memberships.width) {
    throw DataError("score map is " + std::to_string(scores.height) + "x" + std::to_string(scores.width) +
                    " but the view is " + std::to_string(memberships.height) + "x" +
                    std::to_string(memberships.width));
  }
  if (scores.channels != kScoreChannels) {
    throw DataError("score map has " + std::to_string(scores.channels) + " channels, expected " +
                    std::to_string(kScoreChannels));
  }
  for (std::size_t p = 0; p < memberships.pixel_count(); ++p) {
    const auto members = memberships.at(p);
    if (members.empty()) continue;
    const float* s = scores.data.data() + p * kScoreChannels;
    for (const auto& m : members) {
      if (m.point >= acc.size()) {
        throw DataError("membership references point " + std::to_string(m.point) + " of " +
                        std::to_string(acc.size()));
      }
      const double weight = mode == FusionMode::Weighted ? static_cast<double>(m.weight) : 1.0;
      auto& sum = acc.sums[m.point];
      for (int c = 0; c < kNumClasses; ++c) sum[c] += weight * static_cast<double>(s[c]);
      ++acc.visits[m.point];
    }
  }
}

namespace {

// Static 3-d tree over a subset of cloud points; nearest neighbor with ties
// resolved to the smaller point index.
class NearestIndex {
 public:
  NearestIndex(const PointCloud& cloud, std::vector<std::uint32_t> ids)
      : xs_(cloud.xs()), ys_(cloud.ys()), zs_(cloud.zs()), ids_(std::move(ids)) {
    build(0, ids_.size(), 0);
  }

  std::uint32_t nearest(const Point3& q) const {
    best_d2_ = std::numeric_limits<double>::infinity();
    best_ = std::numeric_limits<std::uint32_t>::max();
    search(0, ids_.size(), 0, q);
    return best_;
  }

 private:
  double coord(std::uint32_t id, int axis) const {
    return axis == 0 ? xs_[id] : axis == 1 ? ys_[id] : zs_[id];
  }

  void build(std::size_t lo, std::size_t hi, int axis) {
    if (hi - lo <= 1) return;
    const std::size_t mid = lo + (hi - lo) / 2;
    std::nth_element(ids_.begin() + lo, ids_.begin() + mid, ids_.begin() + hi,
                     [&](std::uint32_t a, std::uint32_t b) {
                       const double ca = coord(a, axis), cb = coord(b, axis);
                       return ca != cb ? ca < cb : a < b;
                     });
    build(lo, mid, (axis + 1) % 3);
    build(mid + 1, hi, (axis + 1) % 3);
  }

  void search(std::size_t lo, std::size_t hi, int axis, const Point3& q) const {
    if (lo >= hi) return;
    const std::size_t mid = lo + (hi - lo) / 2;
    const std::uint32_t id = ids_[mid];
    const double dx = xs_[id] - q.x, dy = ys_[id] - q.y, dz = zs_[id] - q.z;
    const double d2 = dx * dx + dy * dy + dz * dz;
    if (d2 < best_d2_ || (d2 == best_d2_ && id < best_)) {
      best_d2_ = d2;
      best_ = id;
    }
    const double qa = axis == 0 ? q.x : axis == 1 ? q.y : q.z;
    const double delta = qa - coord(id, axis);
    const int next = (axis + 1) % 3;
    if (delta < 0.0) {
      search(lo, mid, next, q);
      if (delta * delta <= best_d2_) search(mid + 1, hi, next, q);
    } else {
      search(mid + 1, hi, next, q);
      if (delta * delta <= best_d2_) search(lo, mid, next, q);
    }
  }

  const std::vector<double>& xs_;
  const std::vector<double>& ys_;
  const std::vector<double>& zs_;
  std::vector<std::uint32_t> ids_;
  mutable double best_d2_ = 0.0;
  mutable std::uint32_t best_ = 0;
};

}  // namespace

std::vector<SemanticLabel> assign_labels(const PointScores& acc, Fallback fallback, const PointCloud& cloud) {
  const std::size_t n = acc.size();
  std::vector<SemanticLabel> labels(n, kUnlabeled);
  std::vector<std::uint32_t> visible;
  for (std::size_t i = 0; i < n; ++i) {
    if (acc.visits[i] == 0) continue;
    const auto& s = acc.sums[i];
    // First maximum wins, so ties go to the smaller class id.
    const auto best = std::max_element(s.begin(), s.end()) - s.begin();
    labels[i] = static_cast<SemanticLabel>(best + 1);
    visible.push_back(static_cast<std::uint32_t>(i));
  }
  if (fallback == Fallback::Unlabeled || visible.size() == n) return labels;

  if (visible.empty()) throw DataError("nearest-neighbor fallback needs at least one visible point");
  if (cloud.size() != n) throw DataError("cloud size does not match the score accumulator");
  const NearestIndex index(cloud, std::move(visible));
  for (std::size_t i = 0; i < n; ++i) {
    if (acc.visits[i] != 0) continue;
    labels[i] = labels[index.nearest(cloud.point(i))];
  }
  return labels;
}

}  // namespace projseg
