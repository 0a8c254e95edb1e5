#include "projseg/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <numbers>
#include <sstream>

#include "projseg/cloud_io.hpp"
#include "projseg/error.hpp"

namespace projseg {

void PipelineConfig::validate() const {
  if (points_path.empty()) throw ConfigError("paths.points is required");
  if (output_dir.empty()) throw ConfigError("paths.output is required");
  if (angles_per_orbit < 1) throw ConfigError("orbit.angles must be >= 1");
  if (pitch_deg.empty()) throw ConfigError("orbit.pitch_deg needs at least one ring");
  if (offsets.size() != pitch_deg.size()) {
    throw ConfigError("orbit.offset must list one offset per pitch (" + std::to_string(pitch_deg.size()) + ")");
  }
  camera.validate();
  splat.validate();
  filter.validate();
  if (!(modalities.jet_min < modalities.jet_max)) throw ConfigError("modalities.jet_min must be < jet_max");
  if (!(modalities.normals.discontinuity > 0.0)) throw ConfigError("modalities.normal_discontinuity must be > 0");
  if (scorer == ScorerKind::External) external.validate();
  if (jobs < 0) throw ConfigError("run.jobs must be >= 0");
}

OrbitSpec PipelineConfig::orbit_spec(const PointCloud& cloud) const {
  OrbitSpec spec;
  if (orbit_center) {
    spec.center = *orbit_center;
  } else if (!cloud.empty()) {
    const auto [lo, hi] = bounding_box(cloud);
    spec.center = {0.5 * (lo.x + hi.x), 0.5 * (lo.y + hi.y), 0.5 * (lo.z + hi.z)};
  }
  spec.angles_per_orbit = angles_per_orbit;
  spec.orbits.clear();
  for (std::size_t k = 0; k < pitch_deg.size(); ++k) {
    spec.orbits.push_back({pitch_deg[k] * std::numbers::pi / 180.0, offsets[k]});
  }
  spec.validate();
  return spec;
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw ConfigError(key + ": not a finite number: '" + v + "'");
  }
  return out;
}

int parse_int(const std::string& key, const std::string& v) {
  int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) throw ConfigError(key + ": not an integer: '" + v + "'");
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(trim(cur));
  return parts;
}

std::vector<double> parse_numbers(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::istringstream in(v);
  std::string tok;
  while (in >> tok) out.push_back(parse_double(key, tok));
  return out;
}

Eigen::Vector3d parse_vec3(const std::string& key, const std::string& v) {
  const auto n = parse_numbers(key, v);
  if (n.size() != 3) throw ConfigError(key + ": expected three numbers");
  return {n[0], n[1], n[2]};
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

PipelineConfig parse_config(std::istream& in) {
  PipelineConfig cfg;
  std::optional<double> fx, fy, cx, cy;
  bool offsets_given = false;

  using Setter = std::function<void(const std::string& key, const std::string& value)>;
  const auto dbl = [](double& field) -> Setter {
    return [&field](const std::string& k, const std::string& v) { field = parse_double(k, v); };
  };
  const auto opt = [](std::optional<double>& field) -> Setter {
    return [&field](const std::string& k, const std::string& v) {
      if (v == "auto") {
        field.reset();
      } else {
        field = parse_double(k, v);
      }
    };
  };
  const auto integer = [](int& field) -> Setter {
    return [&field](const std::string& k, const std::string& v) { field = parse_int(k, v); };
  };
  const auto text = [](std::string& field) -> Setter {
    return [&field](const std::string&, const std::string& v) { field = v; };
  };

  const std::map<std::string, Setter> setters = {
      {"paths.points", text(cfg.points_path)},
      {"paths.labels", text(cfg.labels_path)},
      {"paths.output", text(cfg.output_dir)},
      {"orbit.center",
       [&](const std::string& k, const std::string& v) {
         if (v == "auto") {
           cfg.orbit_center.reset();
         } else {
           const auto c = parse_vec3(k, v);
           cfg.orbit_center = Point3{c.x(), c.y(), c.z()};
         }
       }},
      {"orbit.angles", integer(cfg.angles_per_orbit)},
      {"orbit.pitch_deg",
       [&](const std::string& k, const std::string& v) {
         cfg.pitch_deg.clear();
         for (const auto& part : split(v, ',')) cfg.pitch_deg.push_back(parse_double(k, part));
       }},
      {"orbit.offset",
       [&](const std::string& k, const std::string& v) {
         cfg.offsets.clear();
         offsets_given = true;
         for (const auto& part : split(v, ',')) cfg.offsets.push_back(parse_vec3(k, part));
       }},
      {"camera.width", integer(cfg.camera.width)},
      {"camera.height", integer(cfg.camera.height)},
      {"camera.fx", opt(fx)},
      {"camera.fy", opt(fy)},
      {"camera.cx", opt(cx)},
      {"camera.cy", opt(cy)},
      {"splat.sigma", dbl(cfg.splat.sigma)},
      {"splat.trunc_radius", dbl(cfg.splat.trunc_radius)},
      {"splat.depth_kernel_width", dbl(cfg.splat.depth_kernel_width)},
      {"splat.proximity_weight", dbl(cfg.splat.proximity_weight)},
      {"splat.meanshift_tol", dbl(cfg.splat.meanshift_tol)},
      {"splat.meanshift_max_iters", integer(cfg.splat.meanshift_max_iters)},
      {"splat.cluster_merge_tol", dbl(cfg.splat.cluster_merge_tol)},
      {"filter.near_depth", dbl(cfg.filter.near_depth_threshold)},
      {"filter.near_fraction_max", dbl(cfg.filter.near_fraction_max)},
      {"filter.min_coverage", dbl(cfg.filter.min_coverage)},
      {"modalities.jet_min", dbl(cfg.modalities.jet_min)},
      {"modalities.jet_max", dbl(cfg.modalities.jet_max)},
      {"modalities.normal_discontinuity", dbl(cfg.modalities.normals.discontinuity)},
      {"scorer.kind",
       [&](const std::string& k, const std::string& v) {
         if (v == "baseline") {
           cfg.scorer = ScorerKind::Baseline;
         } else if (v == "external") {
           cfg.scorer = ScorerKind::External;
         } else {
           throw ConfigError(k + ": expected baseline or external");
         }
       }},
      {"scorer.model", text(cfg.model_path)},
      {"scorer.command", text(cfg.external.command)},
      {"scorer.workdir", text(cfg.external.working_dir)},
      {"scorer.timeout", dbl(cfg.external.timeout_seconds)},
      {"fusion.mode",
       [&](const std::string& k, const std::string& v) {
         if (v == "weighted") {
           cfg.fusion = FusionMode::Weighted;
         } else if (v == "uniform") {
           cfg.fusion = FusionMode::Uniform;
         } else {
           throw ConfigError(k + ": expected weighted or uniform");
         }
       }},
      {"fusion.fallback",
       [&](const std::string& k, const std::string& v) {
         if (v == "nearest") {
           cfg.fallback = Fallback::Nearest;
         } else if (v == "unlabeled") {
           cfg.fallback = Fallback::Unlabeled;
         } else {
           throw ConfigError(k + ": expected nearest or unlabeled");
         }
       }},
      {"run.jobs", integer(cfg.jobs)},
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    it->second(key, value);
  }

  if (!offsets_given) cfg.offsets.assign(cfg.pitch_deg.size(), Eigen::Vector3d::Zero());
  const auto centered = CameraIntrinsics::centered(cfg.camera.width, cfg.camera.height);
  cfg.camera.fx = fx.value_or(centered.fx);
  cfg.camera.fy = fy.value_or(centered.fy);
  cfg.camera.cx = cx.value_or(centered.cx);
  cfg.camera.cy = cy.value_or(centered.cy);
  return cfg;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  try {
    return parse_config(in);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string format_config(const PipelineConfig& cfg) {
  std::ostringstream o;
  o << "# projseg resolved configuration\n";
  o << "paths.points = " << cfg.points_path << "\n";
  o << "paths.labels = " << cfg.labels_path << "\n";
  o << "paths.output = " << cfg.output_dir << "\n";
  if (cfg.orbit_center) {
    o << "orbit.center = " << num(cfg.orbit_center->x) << ' ' << num(cfg.orbit_center->y) << ' '
      << num(cfg.orbit_center->z) << "\n";
  } else {
    o << "orbit.center = auto\n";
  }
  o << "orbit.angles = " << cfg.angles_per_orbit << "\n";
  o << "orbit.pitch_deg = ";
  for (std::size_t k = 0; k < cfg.pitch_deg.size(); ++k) o << (k ? ", " : "") << num(cfg.pitch_deg[k]);
  o << "\norbit.offset = ";
  for (std::size_t k = 0; k < cfg.offsets.size(); ++k) {
    o << (k ? ", " : "") << num(cfg.offsets[k].x()) << ' ' << num(cfg.offsets[k].y()) << ' '
      << num(cfg.offsets[k].z());
  }
  o << "\ncamera.width = " << cfg.camera.width << "\n";
  o << "camera.height = " << cfg.camera.height << "\n";
  o << "camera.fx = " << num(cfg.camera.fx) << "\n";
  o << "camera.fy = " << num(cfg.camera.fy) << "\n";
  o << "camera.cx = " << num(cfg.camera.cx) << "\n";
  o << "camera.cy = " << num(cfg.camera.cy) << "\n";
  o << "splat.sigma = " << num(cfg.splat.sigma) << "\n";
  o << "splat.trunc_radius = " << num(cfg.splat.trunc_radius) << "\n";
  o << "splat.depth_kernel_width = " << num(cfg.splat.depth_kernel_width) << "\n";
  o << "splat.proximity_weight = " << num(cfg.splat.proximity_weight) << "\n";
  o << "splat.meanshift_tol = " << num(cfg.splat.meanshift_tol) << "\n";
  o << "splat.meanshift_max_iters = " << cfg.splat.meanshift_max_iters << "\n";
  o << "splat.cluster_merge_tol = " << num(cfg.splat.cluster_merge_tol) << "\n";
  o << "filter.near_depth = " << num(cfg.filter.near_depth_threshold) << "\n";
  o << "filter.near_fraction_max = " << num(cfg.filter.near_fraction_max) << "\n";
  o << "filter.min_coverage = " << num(cfg.filter.min_coverage) << "\n";
  o << "modalities.jet_min = " << num(cfg.modalities.jet_min) << "\n";
  o << "modalities.jet_max = " << num(cfg.modalities.jet_max) << "\n";
  o << "modalities.normal_discontinuity = " << num(cfg.modalities.normals.discontinuity) << "\n";
  o << "scorer.kind = " << (cfg.scorer == ScorerKind::Baseline ? "baseline" : "external") << "\n";
  o << "scorer.model = " << cfg.model_path << "\n";
  o << "scorer.command = " << cfg.external.command << "\n";
  o << "scorer.workdir = " << cfg.external.working_dir << "\n";
  o << "scorer.timeout = " << num(cfg.external.timeout_seconds) << "\n";
  o << "fusion.mode = " << (cfg.fusion == FusionMode::Weighted ? "weighted" : "uniform") << "\n";
  o << "fusion.fallback = " << (cfg.fallback == Fallback::Nearest ? "nearest" : "unlabeled") << "\n";
  o << "run.jobs = " << cfg.jobs << "\n";
  return o.str();
}

}  // namespace projseg
