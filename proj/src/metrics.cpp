#include "projseg/metrics.hpp"

#include <cstdio>
#include <string>

#include "projseg/error.hpp"

namespace projseg {

std::uint64_t ConfusionMatrix::row_sum(int i) const {
  std::uint64_t s = unassigned[i];
  for (int j = 0; j < kNumClasses; ++j) s += counts[i][j];
  return s;
}

std::uint64_t ConfusionMatrix::col_sum(int j) const {
  std::uint64_t s = 0;
  for (int i = 0; i < kNumClasses; ++i) s += counts[i][j];
  return s;
}

std::uint64_t ConfusionMatrix::trace() const {
  std::uint64_t s = 0;
  for (int i = 0; i < kNumClasses; ++i) s += counts[i][i];
  return s;
}

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t s = 0;
  for (int i = 0; i < kNumClasses; ++i) s += row_sum(i);
  return s;
}

ConfusionMatrix confusion(std::span<const SemanticLabel> pred, std::span<const SemanticLabel> gt) {
  if (pred.size() != gt.size()) {
    throw DataError("prediction count " + std::to_string(pred.size()) + " does not match ground truth count " +
                    std::to_string(gt.size()));
  }
  ConfusionMatrix m;
  for (std::size_t k = 0; k < gt.size(); ++k) {
    if (gt[k] == kUnlabeled) continue;
    if (gt[k] > kMaxLabel || pred[k] > kMaxLabel) throw DataError("label outside [0,8] at index " + std::to_string(k));
    if (pred[k] == kUnlabeled) {
      ++m.unassigned[gt[k] - 1];
    } else {
      ++m.counts[gt[k] - 1][pred[k] - 1];
    }
  }
  return m;
}

ClassIoU iou_per_class(const ConfusionMatrix& m) {
  ClassIoU iou;
  for (int i = 0; i < kNumClasses; ++i) {
    const std::uint64_t uni = m.row_sum(i) + m.col_sum(i) - m.counts[i][i];
    if (uni == 0) continue;
    iou[i] = static_cast<double>(m.counts[i][i]) / static_cast<double>(uni);
  }
  return iou;
}

std::optional<double> mean_iou(const ClassIoU& iou) {
  double sum = 0.0;
  int n = 0;
  for (const auto& v : iou) {
    if (!v) continue;
    sum += *v;
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / n;
}

double overall_accuracy(const ConfusionMatrix& m) {
  const auto total = m.total();
  if (total == 0) throw DataError("overall accuracy of an empty confusion matrix");
  return static_cast<double>(m.trace()) / static_cast<double>(total);
}

MetricsReport evaluate(std::span<const SemanticLabel> pred, std::span<const SemanticLabel> gt) {
  const auto m = confusion(pred, gt);
  MetricsReport r;
  r.iou = iou_per_class(m);
  r.avg_iou = mean_iou(r.iou);
  r.overall_accuracy = overall_accuracy(m);
  r.evaluated_points = m.total();
  return r;
}

namespace {

std::string fmt(std::optional<double> v, const char* absent, const char* format = "%.6f") {
  if (!v) return absent;
  char buf[40];
  std::snprintf(buf, sizeof(buf), format, *v);
  return buf;
}

}  // namespace

std::string format_report_text(const MetricsReport& r) {
  std::string s;
  s += "points evaluated: " + std::to_string(r.evaluated_points) + "\n";
  s += "Avg IoU   " + fmt(r.avg_iou, "-") + "\n";
  s += "OA        " + fmt(r.overall_accuracy, "-") + "\n";
  for (int i = 0; i < kNumClasses; ++i) {
    char head[64];
    std::snprintf(head, sizeof(head), "IoU%d      %-9s (%s)\n", i + 1, fmt(r.iou[i], "absent").c_str(), kClassNames[i]);
    s += head;
  }
  return s;
}

std::string format_report_kv(const MetricsReport& r) {
  std::string s;
  s += "evaluated_points = " + std::to_string(r.evaluated_points) + "\n";
  s += "avg_iou = " + fmt(r.avg_iou, "absent", "%.17g") + "\n";
  s += "overall_accuracy = " + fmt(r.overall_accuracy, "absent", "%.17g") + "\n";
  for (int i = 0; i < kNumClasses; ++i) {
    s += "iou" + std::to_string(i + 1) + " = " + fmt(r.iou[i], "absent", "%.17g") + "\n";
  }
  return s;
}

}  // namespace projseg
