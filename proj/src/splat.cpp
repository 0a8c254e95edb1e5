#include "projseg/splat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>

#include "projseg/error.hpp"

namespace projseg {

void SplatConfig::validate() const {
  const auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("splat: ") + what);
  };
  require(sigma > 0.0, "sigma must be > 0");
  require(trunc_radius > 0.0, "trunc_radius must be > 0");
  require(depth_kernel_width > 0.0, "depth_kernel_width must be > 0");
  require(proximity_weight >= 0.0, "proximity_weight must be >= 0");
  require(meanshift_tol > 0.0, "meanshift_tol must be > 0");
  require(meanshift_max_iters >= 1, "meanshift_max_iters must be >= 1");
  require(cluster_merge_tol > 0.0, "cluster_merge_tol must be > 0");
}

namespace {

// exp(-x^2/2) is exactly zero in double precision beyond x ~ 38.6, so kernel
// sums may skip contributors farther than this many bandwidths.
constexpr double kKernelSupport = 40.0;

bool by_depth(const Contribution& a, const Contribution& b) {
  if (a.depth != b.depth) return a.depth < b.depth;
  if (a.weight != b.weight) return a.weight < b.weight;
  return a.point < b.point;
}

struct KernelSums {
  double mass = 0.0;    // sum a_i
  double first = 0.0;   // sum a_i (z_i - d)
  double second = 0.0;  // sum a_i (z_i - d)^2
};

// Contributors sorted by depth. Sums over a_i = w_i G(d - z_i, s); equal
// depths are pooled into one term carrying their summed weight.
class DepthKernel {
 public:
  DepthKernel(std::span<const Contribution> sorted, double s)
      : s_(s), inv_two_s2_(1.0 / (2.0 * s * s)), support_(kKernelSupport * s) {
    for (const auto& c : sorted) {
      if (!terms_.empty() && terms_.back().depth == c.depth) {
        terms_.back().weight += c.weight;
      } else {
        terms_.push_back({c.depth, c.weight});
      }
    }
  }

  KernelSums sums(double d) const {
    KernelSums k;
    const auto [lo, hi] = window(d);
    for (std::size_t i = lo; i < hi; ++i) {
      const double dz = terms_[i].depth - d;
      const double a = terms_[i].weight * std::exp(-dz * dz * inv_two_s2_);
      k.mass += a;
      k.first += a * dz;
      k.second += a * dz * dz;
    }
    return k;
  }

  double density_mass(double d) const {
    double m = 0.0;
    const auto [lo, hi] = window(d);
    for (std::size_t i = lo; i < hi; ++i) {
      const double dz = terms_[i].depth - d;
      m += terms_[i].weight * std::exp(-dz * dz * inv_two_s2_);
    }
    return m;
  }

  double bandwidth() const noexcept { return s_; }

 private:
  struct Term {
    double depth;
    double weight;
  };

  std::pair<std::size_t, std::size_t> window(double d) const {
    const auto lo = std::lower_bound(terms_.begin(), terms_.end(), d - support_,
                                     [](const Term& t, double v) { return t.depth < v; });
    const auto hi = std::upper_bound(lo, terms_.end(), d + support_,
                                     [](double v, const Term& t) { return v < t.depth; });
    return {static_cast<std::size_t>(lo - terms_.begin()), static_cast<std::size_t>(hi - terms_.begin())};
  }

  std::vector<Term> terms_;
  double s_;
  double inv_two_s2_;
  double support_;
};

// Fixed-point iteration d <- sum a_i z_i / sum a_i from `start`.
double iterate_meanshift(const DepthKernel& kernel, double start, const SplatConfig& cfg, bool& hit_max) {
  double d = start;
  hit_max = true;
  for (int n = 0; n < cfg.meanshift_max_iters; ++n) {
    const KernelSums k = kernel.sums(d);
    if (!(k.mass > 0.0)) {
      hit_max = false;
      break;
    }
    const double step = k.first / k.mass;
    d += step;
    if (std::abs(step) < cfg.meanshift_tol) {
      hit_max = false;
      break;
    }
  }
  return d;
}

// Moves a converged mean-shift iterate onto the exact density mode with
// safeguarded Newton steps on the density gradient. Mean-shift approaches a
// mode monotonically but only linearly, so near-degenerate modes can stop
// well short of the true peak; this removes that bias.
double refine_mode(const DepthKernel& kernel, double d, const SplatConfig& cfg) {
  const double s = kernel.bandwidth();
  const double s2 = s * s;
  const double max_step = 0.25 * s;
  const double stop = 1e-6 * cfg.meanshift_tol;
  double lo = -std::numeric_limits<double>::infinity();  // gradient > 0 here
  double hi = std::numeric_limits<double>::infinity();   // gradient < 0 here
  for (int it = 0; it < 100; ++it) {
    const KernelSums k = kernel.sums(d);
    if (!(k.mass > 0.0) || k.first == 0.0) break;
    if (k.first > 0.0) {
      lo = std::max(lo, d);
    } else {
      hi = std::min(hi, d);
    }
    const double curvature = k.second - s2 * k.mass;  // proportional to f''
    double step = k.first / k.mass;                    // mean-shift step
    if (curvature < 0.0) step = -s2 * k.first / curvature;
    step = std::clamp(step, -max_step, max_step);
    double next = d + step;
    if (!(next > lo && next < hi)) {
      if (std::isinf(lo) || std::isinf(hi)) break;
      next = 0.5 * (lo + hi);
    }
    const double moved = std::abs(next - d);
    d = next;
    if (moved < stop) break;
  }
  return d;
}

}  // namespace

namespace detail {

// Contributors must be sorted by depth.
std::vector<double> meanshift_sorted(std::span<const Contribution> sorted, const SplatConfig& cfg,
                                     MeanShiftStats* stats) {
  if (sorted.empty()) return {};
  const DepthKernel kernel(sorted, cfg.depth_kernel_width);

  // Distinct start depths with multiplicities. Identical starts share a trajectory.
  std::vector<double> starts;
  std::vector<std::size_t> multiplicity;
  for (const auto& c : sorted) {
    if (starts.empty() || c.depth != starts.back()) {
      starts.push_back(c.depth);
      multiplicity.push_back(1);
    } else {
      ++multiplicity.back();
    }
  }

  const std::size_t m = starts.size();
  std::vector<double> limit(m, std::numeric_limits<double>::quiet_NaN());
  std::size_t iterated = 0;
  std::size_t max_hits = 0;
  const auto run = [&](std::size_t k) {
    bool hit_max = false;
    const double d = iterate_meanshift(kernel, starts[k], cfg, hit_max);
    limit[k] = refine_mode(kernel, d, cfg);
    ++iterated;
    if (hit_max) ++max_hits;
  };

  // The 1-D Gaussian mean-shift map is non-decreasing in d, so the limit is a
  // monotone function of the start. When both ends of a run of starts reach
  // the same mode, every start in between reaches it as well.
  const auto same_mode = [](double a, double b) {
    return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a));
  };
  run(0);
  if (m > 1) run(m - 1);
  struct Span { std::size_t lo, hi; };
  std::vector<Span> todo;
  if (m > 2) todo.push_back({0, m - 1});
  while (!todo.empty()) {
    const Span sp = todo.back();
    todo.pop_back();
    if (sp.hi - sp.lo < 2) continue;
    if (same_mode(limit[sp.lo], limit[sp.hi])) {
      for (std::size_t k = sp.lo + 1; k < sp.hi; ++k) limit[k] = limit[sp.lo];
      continue;
    }
    const std::size_t mid = sp.lo + (sp.hi - sp.lo) / 2;
    run(mid);
    todo.push_back({mid, sp.hi});
    todo.push_back({sp.lo, mid});
  }

  if (stats) {
    stats->starts += sorted.size();
    stats->iterated += iterated;
    stats->max_iter_hits += max_hits;
  }

  // Merge converged iterates (one per contributor) into cluster centers.
  std::vector<std::pair<double, std::size_t>> converged(m);
  for (std::size_t k = 0; k < m; ++k) converged[k] = {limit[k], multiplicity[k]};
  std::sort(converged.begin(), converged.end());
  std::vector<double> centers;
  double sum = 0.0;
  std::size_t count = 0;
  double prev = 0.0;
  for (const auto& [value, mult] : converged) {
    if (count > 0 && value - prev >= cfg.cluster_merge_tol) {
      centers.push_back(sum / static_cast<double>(count));
      sum = 0.0;
      count = 0;
    }
    sum += value * static_cast<double>(mult);
    count += mult;
    prev = value;
  }
  centers.push_back(sum / static_cast<double>(count));
  // Mean of iterates can only leave the contributor range through rounding.
  for (auto& c : centers) c = std::clamp(c, sorted.front().depth, sorted.back().depth);
  return centers;
}

ClusterResult cluster_scores_sorted(std::span<const double> centers, std::span<const Contribution> sorted,
                                    const SplatConfig& cfg) {
  ClusterResult r;
  r.centers.assign(centers.begin(), centers.end());
  double total = 0.0;
  for (const auto& c : sorted) total += c.weight;
  const DepthKernel kernel(sorted, cfg.depth_kernel_width);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < r.centers.size(); ++k) {
    const double d = r.centers[k];
    if (!(d > 0.0)) {
      throw std::invalid_argument("cluster center at non-positive depth " + std::to_string(d));
    }
    const double v = kernel.density_mass(d) / total;
    const double score = v + cfg.proximity_weight / d;
    r.densities.push_back(v);
    r.scores.push_back(score);
    // Strict > keeps the first (nearest) cluster on ties.
    if (score > best || (score == best && d < r.centers[r.chosen])) {
      best = score;
      r.chosen = k;
    }
  }
  return r;
}

}  // namespace detail

namespace {

std::vector<Contribution> sorted_copy(std::span<const Contribution> contribs) {
  std::vector<Contribution> v(contribs.begin(), contribs.end());
  std::stable_sort(v.begin(), v.end(), by_depth);
  return v;
}

}  // namespace

std::vector<double> meanshift_depths(std::span<const Contribution> contribs, const SplatConfig& cfg,
                                     MeanShiftStats* stats) {
  if (std::is_sorted(contribs.begin(), contribs.end(), by_depth)) {
    return detail::meanshift_sorted(contribs, cfg, stats);
  }
  const auto sorted = sorted_copy(contribs);
  return detail::meanshift_sorted(sorted, cfg, stats);
}

ClusterResult cluster_scores(std::span<const double> centers, std::span<const Contribution> contribs,
                             const SplatConfig& cfg) {
  if (std::is_sorted(contribs.begin(), contribs.end(), by_depth)) {
    return detail::cluster_scores_sorted(centers, contribs, cfg);
  }
  const auto sorted = sorted_copy(contribs);
  return detail::cluster_scores_sorted(centers, sorted, cfg);
}

PixelComposite composite_pixel(std::span<const Contribution> contribs, double chosen_depth,
                               const SplatConfig& cfg, const PointCloud& cloud) {
  PixelComposite out;
  out.depth = chosen_depth;
  const double inv_two_s2 = 1.0 / (2.0 * cfg.depth_kernel_width * cfg.depth_kernel_width);
  const auto& colors = cloud.colors();
  double mass = 0.0;
  std::array<double, 3> acc{};
  out.memberships.reserve(contribs.size());
  double last_depth = std::numeric_limits<double>::quiet_NaN();
  double g = 0.0;
  for (const auto& c : contribs) {
    if (c.depth != last_depth) {
      const double dz = chosen_depth - c.depth;
      g = std::exp(-dz * dz * inv_two_s2);
      last_depth = c.depth;
    }
    const double a = c.weight * g;
    if (a == 0.0) continue;
    mass += a;
    for (int ch = 0; ch < 3; ++ch) acc[ch] += a * colors[c.point][ch];
    if (a >= kMembershipFloor) out.memberships.push_back({c.point, static_cast<float>(a)});
  }
  if (mass > 0.0) {
    for (int ch = 0; ch < 3; ++ch) out.rgb[ch] = acc[ch] / mass;
  }
  return out;
}

namespace {

struct ProjectedPoint {
  double u = 0.0;
  double v = 0.0;
  double depth = 0.0;
  PointIndex point = 0;
};

// Points bucketed by the (margin-extended) pixel they project into, so each
// pixel can collect its contributors from a small neighborhood of buckets.
class ProjectionBins {
 public:
  ProjectionBins(const PointCloud& cloud, const CameraPose& pose, const CameraIntrinsics& K,
                 const SplatConfig& cfg)
      : width_(K.width), height_(K.height), margin_(static_cast<int>(std::ceil(cfg.trunc_radius))),
        radius_(cfg.trunc_radius), inv_two_sigma2_(1.0 / (2.0 * cfg.sigma * cfg.sigma)) {
    if (cloud.size() > std::numeric_limits<PointIndex>::max()) {
      throw DataError("point cloud exceeds the 32-bit point index range");
    }
    bins_w_ = width_ + 2 * margin_;
    bins_h_ = height_ + 2 * margin_;
    const auto& R = pose.rotation;
    const auto& t = pose.translation;
    const auto& xs = cloud.xs();
    const auto& ys = cloud.ys();
    const auto& zs = cloud.zs();
    std::vector<ProjectedPoint> projected;
    std::vector<std::uint32_t> bin_of;
    projected.reserve(cloud.size() / 4);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      const double px = R(0, 0) * xs[i] + R(0, 1) * ys[i] + R(0, 2) * zs[i] + t.x();
      const double py = R(1, 0) * xs[i] + R(1, 1) * ys[i] + R(1, 2) * zs[i] + t.y();
      const double pz = R(2, 0) * xs[i] + R(2, 1) * ys[i] + R(2, 2) * zs[i] + t.z();
      if (!(pz > 0.0)) continue;
      const double u = K.fx * px / pz + K.cx;
      const double v = K.fy * py / pz + K.cy;
      const double bu = std::floor(u) + margin_;
      const double bv = std::floor(v) + margin_;
      if (!(bu >= 0.0 && bu < bins_w_ && bv >= 0.0 && bv < bins_h_)) continue;
      projected.push_back({u, v, pz, static_cast<PointIndex>(i)});
      bin_of.push_back(static_cast<std::uint32_t>(bv) * bins_w_ + static_cast<std::uint32_t>(bu));
    }
    // Counting sort keeps point-index order within each bin.
    offsets_.assign(static_cast<std::size_t>(bins_w_) * bins_h_ + 1, 0);
    for (const auto b : bin_of) ++offsets_[b + 1];
    for (std::size_t b = 1; b < offsets_.size(); ++b) offsets_[b] += offsets_[b - 1];
    points_.resize(projected.size());
    std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
    for (std::size_t k = 0; k < projected.size(); ++k) points_[cursor[bin_of[k]]++] = projected[k];
  }

  // Appends contributors of pixel (row, col) to `out`, in bin order.
  void gather(int row, int col, std::vector<Contribution>& out) const {
    const double pu = col + 0.5;
    const double pv = row + 0.5;
    const double r2 = radius_ * radius_;
    for (int br = row; br <= row + 2 * margin_; ++br) {
      const std::size_t base = static_cast<std::size_t>(br) * bins_w_;
      const std::size_t first = offsets_[base + col];
      const std::size_t last = offsets_[base + col + 2 * margin_ + 1];
      for (std::size_t k = first; k < last; ++k) {
        const auto& p = points_[k];
        const double du = p.u - pu;
        const double dv = p.v - pv;
        const double d2 = du * du + dv * dv;
        if (!(d2 < r2)) continue;
        out.push_back({p.point, std::exp(-d2 * inv_two_sigma2_), p.depth});
      }
    }
  }

 private:
  int width_, height_, margin_;
  int bins_w_ = 0, bins_h_ = 0;
  double radius_;
  double inv_two_sigma2_;
  std::vector<std::size_t> offsets_;
  std::vector<ProjectedPoint> points_;
};

// Deterministic contributor order independent of the cloud's point order:
// depth, weight, then color, with the index only as a last resort.
void sort_contributors(std::vector<Contribution>& c, const PointCloud& cloud) {
  const auto& colors = cloud.colors();
  std::sort(c.begin(), c.end(), [&](const Contribution& a, const Contribution& b) {
    if (a.depth != b.depth) return a.depth < b.depth;
    if (a.weight != b.weight) return a.weight < b.weight;
    if (colors[a.point] != colors[b.point]) return colors[a.point] < colors[b.point];
    return a.point < b.point;
  });
}

std::uint8_t vote_label(std::span<const Membership> members, const std::vector<SemanticLabel>& labels) {
  std::array<double, kNumClasses + 1> votes{};
  for (const auto& m : members) votes[labels[m.point]] += m.weight;
  std::uint8_t best = kUnlabeled;
  double best_w = 0.0;
  for (int c = 1; c <= kNumClasses; ++c) {
    if (votes[c] > best_w) {
      best_w = votes[c];
      best = static_cast<std::uint8_t>(c);
    }
  }
  return best;
}

}  // namespace

PixelContributors gather_contributions(const PointCloud& cloud, const CameraPose& pose,
                                       const CameraIntrinsics& K, const SplatConfig& cfg) {
  cfg.validate();
  K.validate();
  const ProjectionBins bins(cloud, pose, K, cfg);
  PixelContributors out;
  out.height = K.height;
  out.width = K.width;
  out.offsets.reserve(K.pixel_count() + 1);
  out.offsets.push_back(0);
  std::vector<Contribution> scratch;
  for (int row = 0; row < K.height; ++row) {
    for (int col = 0; col < K.width; ++col) {
      scratch.clear();
      bins.gather(row, col, scratch);
      std::sort(scratch.begin(), scratch.end(),
                [](const Contribution& a, const Contribution& b) { return a.point < b.point; });
      out.entries.insert(out.entries.end(), scratch.begin(), scratch.end());
      out.offsets.push_back(out.entries.size());
    }
  }
  return out;
}

RenderedView render_view(const PointCloud& cloud, const CameraPose& pose, const CameraIntrinsics& K,
                         const SplatConfig& cfg, const RenderOptions& options) {
  cfg.validate();
  K.validate();
  pose.validate();
  if (options.label_image && !cloud.has_labels()) {
    throw DataError("label image requested for an unlabeled cloud");
  }

  RenderedView view;
  view.pose = pose;
  view.intrinsics = K;
  view.depth = DepthImage(K.height, K.width, 1, kEmptyDepth);
  view.rgb = Image<float>(K.height, K.width, 3, 0.0f);
  if (options.label_image) view.labels = Image<std::uint8_t>(K.height, K.width, 1, kBackgroundLabel);

  const ProjectionBins bins(cloud, pose, K, cfg);

  struct RowResult {
    std::vector<Membership> entries;
    std::vector<std::uint32_t> counts;
    RenderStats stats;
  };
  std::vector<RowResult> rows(static_cast<std::size_t>(K.height));

  tbb::parallel_for(tbb::blocked_range<int>(0, K.height), [&](const tbb::blocked_range<int>& range) {
    std::vector<Contribution> contribs;
    for (int row = range.begin(); row < range.end(); ++row) {
      RowResult& rr = rows[static_cast<std::size_t>(row)];
      rr.counts.assign(static_cast<std::size_t>(K.width), 0);
      for (int col = 0; col < K.width; ++col) {
        contribs.clear();
        bins.gather(row, col, contribs);
        if (contribs.empty()) continue;
        sort_contributors(contribs, cloud);
        rr.stats.contributions += contribs.size();

        const auto centers = detail::meanshift_sorted(contribs, cfg, &rr.stats.meanshift);
        const auto clusters = detail::cluster_scores_sorted(centers, contribs, cfg);
        const double chosen = clusters.centers[clusters.chosen];
        const PixelComposite px = composite_pixel(contribs, chosen, cfg, cloud);

        view.depth.at(row, col) = static_cast<float>(px.depth);
        for (int ch = 0; ch < 3; ++ch) view.rgb.at(row, col, ch) = static_cast<float>(px.rgb[ch]);
        if (view.labels) view.labels->at(row, col) = vote_label(px.memberships, cloud.labels());
        rr.counts[static_cast<std::size_t>(col)] = static_cast<std::uint32_t>(px.memberships.size());
        rr.entries.insert(rr.entries.end(), px.memberships.begin(), px.memberships.end());
        ++rr.stats.covered_pixels;
      }
    }
  });

  auto& mm = view.memberships;
  mm.height = K.height;
  mm.width = K.width;
  mm.offsets.reserve(K.pixel_count() + 1);
  mm.offsets.push_back(0);
  std::size_t total = 0;
  for (const auto& rr : rows) total += rr.entries.size();
  mm.entries.reserve(total);
  for (auto& rr : rows) {
    for (const auto n : rr.counts) mm.offsets.push_back(mm.offsets.back() + n);
    mm.entries.insert(mm.entries.end(), rr.entries.begin(), rr.entries.end());
    view.stats.covered_pixels += rr.stats.covered_pixels;
    view.stats.contributions += rr.stats.contributions;
    view.stats.meanshift.starts += rr.stats.meanshift.starts;
    view.stats.meanshift.iterated += rr.stats.meanshift.iterated;
    view.stats.meanshift.max_iter_hits += rr.stats.meanshift.max_iter_hits;
    rr = RowResult{};
  }
  view.stats.memberships = mm.entries.size();
  return view;
}

}  // namespace projseg
