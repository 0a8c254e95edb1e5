#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "projseg/camera.hpp"
#include "projseg/external_scorer.hpp"
#include "projseg/fusion.hpp"
#include "projseg/scoring.hpp"
#include "projseg/splat.hpp"
#include "projseg/view_planner.hpp"

namespace projseg {

enum class ScorerKind { Baseline, External };

/// Everything a pipeline run depends on. Serialized as flat "section.key = value"
/// lines; the resolved form written next to outputs reproduces the run.
struct PipelineConfig {
  std::string points_path;
  std::string labels_path;  ///< optional
  std::string output_dir = "projseg_out";

  std::optional<Point3> orbit_center;  ///< empty: bounding-box center of the cloud
  int angles_per_orbit = 30;
  std::vector<double> pitch_deg{-15.0, 0.0, 15.0, 30.0};
  std::vector<Eigen::Vector3d> offsets{4, Eigen::Vector3d::Zero()};

  CameraIntrinsics camera;
  SplatConfig splat;
  ViewFilterConfig filter;
  ModalityOptions modalities;

  ScorerKind scorer = ScorerKind::Baseline;
  std::string model_path;  ///< baseline: load this model instead of training
  ExternalScorerSpec external;

  FusionMode fusion = FusionMode::Weighted;
  Fallback fallback = Fallback::Nearest;
  int jobs = 0;  ///< 0 = one per logical core

  void validate() const;  // throws ConfigError
  OrbitSpec orbit_spec(const PointCloud& cloud) const;
};

/// Unknown keys and malformed values are ConfigErrors. Keys not present keep
/// their defaults; camera.fx/fy/cx/cy default to a centered camera of the
/// configured size.
PipelineConfig parse_config(std::istream& in);
PipelineConfig load_config(const std::string& path);

/// Fully expanded configuration text.
std::string format_config(const PipelineConfig& cfg);

}  // namespace projseg
