#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <utility>

#include "projseg/cloud.hpp"

namespace projseg {

/// Reads "x y z intensity r g b" lines. A single trailing newline is allowed;
/// empty interior lines are errors so points and labels stay aligned.
PointCloud parse_points(std::istream& in);

/// Attaches a Semantic3D `.labels` stream (one integer in [0,8] per line).
PointCloud parse_labels(std::istream& in, PointCloud cloud);

void write_predictions(std::span<const SemanticLabel> labels, std::ostream& out);

/// Component-wise bounds. Throws DataError on an empty cloud.
std::pair<Point3, Point3> bounding_box(const PointCloud& cloud);

// File conveniences; errors carry the path.
PointCloud load_points(const std::string& path);
PointCloud load_points_with_labels(const std::string& points_path, const std::string& labels_path);
std::vector<SemanticLabel> load_labels(const std::string& path, std::size_t expected_count);
/// Any number of labels; used where no point count is at hand.
std::vector<SemanticLabel> load_label_file(const std::string& path);
void save_predictions(std::span<const SemanticLabel> labels, const std::string& path);

}  // namespace projseg
