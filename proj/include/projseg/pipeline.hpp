#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "projseg/config.hpp"
#include "projseg/metrics.hpp"
#include "projseg/view_planner.hpp"

namespace projseg {

/// One planned view as recorded in the manifest.
struct ManifestEntry {
  std::size_t id = 0;
  ViewVerdict verdict;
  CameraPose pose;
};

/// Written by `render`, read by `score` and `fuse`.
struct Manifest {
  CameraIntrinsics camera;
  std::size_t point_count = 0;
  bool has_labels = false;
  std::vector<ManifestEntry> views;

  std::vector<std::size_t> kept_ids() const;
};

void save_manifest(const std::string& path, const Manifest& manifest);
Manifest load_manifest(const std::string& path);

/// Artifact paths inside an output directory.
struct OutputLayout {
  std::string root;

  std::string manifest() const;
  std::string resolved_config() const;
  std::string model() const;
  std::string predictions() const;
  std::string metrics_text() const;
  std::string metrics_kv() const;
  std::string view_file(std::size_t id, const std::string& suffix) const;  // views/view_NNN<suffix>
  std::string scores(std::size_t id) const;
};

struct RenderSummary {
  std::size_t planned = 0;
  std::size_t kept = 0;
};

RenderSummary cmd_render(const PipelineConfig& cfg);
void cmd_score(const PipelineConfig& cfg);
void cmd_fuse(const PipelineConfig& cfg);
MetricsReport cmd_eval(const std::string& predictions_path, const std::string& gt_path,
                       const std::string& output_dir);
/// render, score, fuse, then eval when paths.labels is set.
void cmd_pipeline(const PipelineConfig& cfg);

}  // namespace projseg
