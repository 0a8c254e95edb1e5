#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "projseg/cloud.hpp"

namespace projseg {

/// counts[i][j]: points with ground truth class i+1 predicted as class j+1.
/// Points with ground truth 0 are ignored; points predicted 0 land in
/// `unassigned[i]`, which counts against class i through its row sum.
struct ConfusionMatrix {
  std::array<std::array<std::uint64_t, kNumClasses>, kNumClasses> counts{};
  std::array<std::uint64_t, kNumClasses> unassigned{};

  std::uint64_t row_sum(int i) const;  // includes unassigned
  std::uint64_t col_sum(int j) const;
  std::uint64_t trace() const;
  std::uint64_t total() const;
};

ConfusionMatrix confusion(std::span<const SemanticLabel> pred, std::span<const SemanticLabel> gt);

using ClassIoU = std::array<std::optional<double>, kNumClasses>;

/// c_ii / (row_i + col_i - c_ii); empty when class i has neither ground truth
/// nor predictions.
ClassIoU iou_per_class(const ConfusionMatrix& m);

/// Mean over present classes; empty when none is present.
std::optional<double> mean_iou(const ClassIoU& iou);

/// trace / total. Throws DataError on an empty matrix.
double overall_accuracy(const ConfusionMatrix& m);

struct MetricsReport {
  ClassIoU iou{};
  std::optional<double> avg_iou;
  double overall_accuracy = 0.0;
  std::uint64_t evaluated_points = 0;
};

MetricsReport evaluate(std::span<const SemanticLabel> pred, std::span<const SemanticLabel> gt);

/// Human-readable table with Avg IoU, OA and IoU1..IoU8.
std::string format_report_text(const MetricsReport& report);
/// One "key = value" per line; absent IoUs are written as "absent".
std::string format_report_kv(const MetricsReport& report);

}  // namespace projseg
