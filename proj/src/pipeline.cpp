#include "projseg/pipeline.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <tbb/global_control.h>
#include <tbb/parallel_for.h>

#include "projseg/cloud_io.hpp"
#include "projseg/error.hpp"
#include "projseg/external_scorer.hpp"
#include "projseg/fusion.hpp"
#include "projseg/modalities.hpp"
#include "projseg/raster_io.hpp"
#include "projseg/scoring.hpp"
#include "projseg/splat.hpp"

namespace fs = std::filesystem;

namespace projseg {

std::vector<std::size_t> Manifest::kept_ids() const {
  std::vector<std::size_t> ids;
  for (const auto& v : views) {
    if (v.verdict.kept) ids.push_back(v.id);
  }
  return ids;
}

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void save_manifest(const std::string& path, const Manifest& m) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path + " for writing");
  out << "projseg-manifest 1\n";
  out << "camera " << m.camera.width << ' ' << m.camera.height << ' ' << num(m.camera.fx) << ' ' << num(m.camera.fy)
      << ' ' << num(m.camera.cx) << ' ' << num(m.camera.cy) << '\n';
  out << "points " << m.point_count << '\n';
  out << "labels " << (m.has_labels ? 1 : 0) << '\n';
  out << "planned " << m.views.size() << '\n';
  for (const auto& v : m.views) {
    out << "view " << v.id << ' ' << (v.verdict.kept ? "kept" : "discarded") << ' ' << v.verdict.reason
        << " coverage " << num(v.verdict.coverage) << " near " << num(v.verdict.near_fraction) << " R";
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) out << ' ' << num(v.pose.rotation(r, c));
    }
    out << " t";
    for (int k = 0; k < 3; ++k) out << ' ' << num(v.pose.translation[k]);
    out << '\n';
  }
  out.close();
  if (!out) throw DataError("write failure on " + path);
}

Manifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("missing manifest " + path + " (run 'render' first)");
  const auto fail = [&](const std::string& what) { return DataError(path + ": " + what); };
  Manifest m;
  std::string tag;
  int version = 0;
  std::size_t planned = 0;
  int labels = 0;
  if (!(in >> tag >> version) || tag != "projseg-manifest" || version != 1) throw fail("not a manifest");
  if (!(in >> tag >> m.camera.width >> m.camera.height >> m.camera.fx >> m.camera.fy >> m.camera.cx >> m.camera.cy) ||
      tag != "camera") {
    throw fail("bad camera record");
  }
  if (!(in >> tag >> m.point_count) || tag != "points") throw fail("bad points record");
  if (!(in >> tag >> labels) || tag != "labels") throw fail("bad labels record");
  m.has_labels = labels != 0;
  if (!(in >> tag >> planned) || tag != "planned") throw fail("bad planned record");
  for (std::size_t k = 0; k < planned; ++k) {
    ManifestEntry e;
    std::string verdict, cov_tag, near_tag, r_tag, t_tag;
    if (!(in >> tag >> e.id >> verdict >> e.verdict.reason >> cov_tag >> e.verdict.coverage >> near_tag >>
          e.verdict.near_fraction >> r_tag) ||
        tag != "view" || cov_tag != "coverage" || near_tag != "near" || r_tag != "R") {
      throw fail("bad view record " + std::to_string(k));
    }
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        if (!(in >> e.pose.rotation(r, c))) throw fail("bad rotation in view " + std::to_string(k));
      }
    }
    if (!(in >> t_tag) || t_tag != "t") throw fail("bad view record " + std::to_string(k));
    for (int j = 0; j < 3; ++j) {
      if (!(in >> e.pose.translation[j])) throw fail("bad translation in view " + std::to_string(k));
    }
    e.verdict.kept = verdict == "kept";
    m.views.push_back(e);
  }
  return m;
}

std::string OutputLayout::manifest() const { return (fs::path(root) / "manifest.txt").string(); }
std::string OutputLayout::resolved_config() const { return (fs::path(root) / "config.resolved").string(); }
std::string OutputLayout::model() const { return (fs::path(root) / "baseline.model").string(); }
std::string OutputLayout::predictions() const { return (fs::path(root) / "predictions.labels").string(); }
std::string OutputLayout::metrics_text() const { return (fs::path(root) / "metrics.txt").string(); }
std::string OutputLayout::metrics_kv() const { return (fs::path(root) / "metrics.kv").string(); }

std::string OutputLayout::view_file(std::size_t id, const std::string& suffix) const {
  char name[32];
  std::snprintf(name, sizeof(name), "view_%03zu", id);
  return (fs::path(root) / "views" / (name + suffix)).string();
}

std::string OutputLayout::scores(std::size_t id) const {
  char name[40];
  std::snprintf(name, sizeof(name), "view_%03zu.spsc", id);
  return (fs::path(root) / "scores" / name).string();
}

namespace {

constexpr const char* kDepthSuffix = ".depth.spdz";
constexpr const char* kRgbSuffix = ".rgb.png";
constexpr const char* kJetSuffix = ".jet.png";
constexpr const char* kNormalSuffix = ".normal.png";
constexpr const char* kLabelSuffix = ".labels.png";
constexpr const char* kMemberSuffix = ".spix";

tbb::global_control parallelism(int jobs) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  return tbb::global_control(tbb::global_control::max_allowed_parallelism,
                             jobs > 0 ? static_cast<std::size_t>(jobs) : hw);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path + " for writing");
  out << text;
  out.close();
  if (!out) throw DataError("write failure on " + path);
}

void make_dir(const fs::path& p) {
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw DataError("cannot create directory " + p.string() + ": " + ec.message());
}

void reset_dir(const fs::path& p) {
  std::error_code ec;
  fs::remove_all(p, ec);
  make_dir(p);
}

void require_file(const std::string& path, const char* stage) {
  if (!fs::exists(path)) {
    throw DataError("missing upstream artifact " + path + " (run '" + stage + "' first)");
  }
}

PointCloud load_cloud(const PipelineConfig& cfg) {
  if (!fs::exists(cfg.points_path)) throw DataError("points file not found: " + cfg.points_path);
  if (cfg.labels_path.empty()) return load_points(cfg.points_path);
  return load_points_with_labels(cfg.points_path, cfg.labels_path);
}

ViewModalities load_view(const OutputLayout& out, std::size_t id, bool with_labels) {
  for (const char* suffix : {kDepthSuffix, kRgbSuffix, kJetSuffix, kNormalSuffix}) {
    require_file(out.view_file(id, suffix), "render");
  }
  ViewModalities v;
  v.depth = load_depth(out.view_file(id, kDepthSuffix));
  v.rgb = load_png(out.view_file(id, kRgbSuffix));
  v.jet = load_png(out.view_file(id, kJetSuffix));
  v.normal = load_png(out.view_file(id, kNormalSuffix));
  if (with_labels) {
    require_file(out.view_file(id, kLabelSuffix), "render");
    v.labels = load_png(out.view_file(id, kLabelSuffix));
  }
  return v;
}

}  // namespace

RenderSummary cmd_render(const PipelineConfig& cfg) {
  cfg.validate();
  const auto control = parallelism(cfg.jobs);
  const PointCloud cloud = load_cloud(cfg);
  const auto poses = plan_orbit_views(cfg.orbit_spec(cloud));
  const OutputLayout out{cfg.output_dir};
  make_dir(out.root);
  reset_dir(fs::path(out.root) / "views");
  write_text(out.resolved_config(), format_config(cfg));

  RenderOptions options;
  options.label_image = cloud.has_labels();

  Manifest manifest;
  manifest.camera = cfg.camera;
  manifest.point_count = cloud.size();
  manifest.has_labels = cloud.has_labels();
  RenderSummary summary;
  for (std::size_t id = 0; id < poses.size(); ++id) {
    const RenderedView view = render_view(cloud, poses[id], cfg.camera, cfg.splat, options);
    ManifestEntry entry{id, evaluate_view(view.depth, cfg.filter), poses[id]};
    ++summary.planned;
    if (entry.verdict.kept) {
      ++summary.kept;
      const ViewModalities m = make_modalities(view, cfg.modalities);
      save_depth(out.view_file(id, kDepthSuffix), view.depth);
      save_png(out.view_file(id, kRgbSuffix), m.rgb);
      save_png(out.view_file(id, kJetSuffix), m.jet);
      save_png(out.view_file(id, kNormalSuffix), m.normal);
      if (m.labels) save_png(out.view_file(id, kLabelSuffix), *m.labels);
      save_memberships(out.view_file(id, kMemberSuffix), view.memberships);
    }
    manifest.views.push_back(std::move(entry));
  }
  save_manifest(out.manifest(), manifest);
  return summary;
}

void cmd_score(const PipelineConfig& cfg) {
  cfg.validate();
  const auto control = parallelism(cfg.jobs);
  const OutputLayout out{cfg.output_dir};
  const Manifest manifest = load_manifest(out.manifest());
  const auto kept = manifest.kept_ids();
  reset_dir(fs::path(out.root) / "scores");
  write_text(out.resolved_config(), format_config(cfg));
  if (kept.empty()) return;

  if (cfg.scorer == ScorerKind::External) {
    tbb::parallel_for(std::size_t{0}, kept.size(), [&](std::size_t k) {
      const std::size_t id = kept[k];
      for (const char* suffix : {kRgbSuffix, kJetSuffix, kNormalSuffix}) require_file(out.view_file(id, suffix), "render");
      const ScorerInputs inputs{fs::absolute(out.view_file(id, kRgbSuffix)).string(),
                                fs::absolute(out.view_file(id, kJetSuffix)).string(),
                                fs::absolute(out.view_file(id, kNormalSuffix)).string(),
                                fs::absolute(out.scores(id)).string()};
      char name[32];
      std::snprintf(name, sizeof(name), "view %zu", id);
      run_external_scorer(cfg.external, inputs, manifest.camera.height, manifest.camera.width, name);
    });
    return;
  }

  BaselineModel model;
  if (!cfg.model_path.empty()) {
    model = load_model(cfg.model_path);
  } else {
    if (!manifest.has_labels) {
      throw DataError("baseline scorer needs scorer.model or a labeled cloud (paths.labels) to train on");
    }
    BaselineTrainer trainer;
    for (const auto id : kept) trainer.add(load_view(out, id, true));
    model = trainer.finish();
    save_model(out.model(), model);
  }
  for (const auto id : kept) {
    save_scores(out.scores(id), score_view_baseline(model, load_view(out, id, false)));
  }
}

void cmd_fuse(const PipelineConfig& cfg) {
  cfg.validate();
  const OutputLayout out{cfg.output_dir};
  const Manifest manifest = load_manifest(out.manifest());
  write_text(out.resolved_config(), format_config(cfg));
  if (!fs::exists(cfg.points_path)) throw DataError("points file not found: " + cfg.points_path);
  const PointCloud cloud = load_points(cfg.points_path);
  if (cloud.size() != manifest.point_count) {
    throw DataError("points file has " + std::to_string(cloud.size()) + " points but the manifest was rendered from " +
                    std::to_string(manifest.point_count));
  }
  PointScores acc(cloud.size());
  for (const auto id : manifest.kept_ids()) {
    require_file(out.view_file(id, kMemberSuffix), "render");
    require_file(out.scores(id), "score");
    backproject(load_memberships(out.view_file(id, kMemberSuffix)), load_scores(out.scores(id)), acc, cfg.fusion);
  }
  save_predictions(assign_labels(acc, cfg.fallback, cloud), out.predictions());
}

MetricsReport cmd_eval(const std::string& predictions_path, const std::string& gt_path,
                       const std::string& output_dir) {
  if (!fs::exists(predictions_path)) throw DataError("missing predictions " + predictions_path + " (run 'fuse' first)");
  const auto gt = load_label_file(gt_path);
  const auto pred = load_label_file(predictions_path);
  const MetricsReport report = evaluate(pred, gt);
  if (!output_dir.empty()) {
    const OutputLayout out{output_dir};
    make_dir(out.root);
    write_text(out.metrics_text(), format_report_text(report));
    write_text(out.metrics_kv(), format_report_kv(report));
  }
  return report;
}

void cmd_pipeline(const PipelineConfig& cfg) {
  cmd_render(cfg);
  cmd_score(cfg);
  cmd_fuse(cfg);
  if (!cfg.labels_path.empty()) {
    const OutputLayout out{cfg.output_dir};
    cmd_eval(out.predictions(), cfg.labels_path, cfg.output_dir);
  }
}

}  // namespace projseg
