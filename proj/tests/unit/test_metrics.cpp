#include "doctest.h"

#include <random>

#include "projseg/error.hpp"
#include "projseg/metrics.hpp"

using namespace projseg;

namespace {

void append(std::vector<SemanticLabel>& pred, std::vector<SemanticLabel>& gt, SemanticLabel p, SemanticLabel g,
            int n) {
  for (int i = 0; i < n; ++i) {
    pred.push_back(p);
    gt.push_back(g);
  }
}

}  // namespace

TEST_CASE("two-class hand case") {
  std::vector<SemanticLabel> pred, gt;
  append(pred, gt, 1, 1, 50);
  append(pred, gt, 2, 1, 10);
  append(pred, gt, 1, 2, 5);
  append(pred, gt, 2, 2, 35);
  const auto m = confusion(pred, gt);
  CHECK(m.counts[0][1] == 10);
  const auto iou = iou_per_class(m);
  CHECK(*iou[0] == 50.0 / 65.0);
  CHECK(*iou[1] == 35.0 / 50.0);
  CHECK_FALSE(iou[2]);
  CHECK(overall_accuracy(m) == 0.85);
  CHECK(*mean_iou(iou) == doctest::Approx((50.0 / 65.0 + 0.7) / 2));
}

TEST_CASE("unlabeled ground truth is skipped, unassigned predictions count as errors") {
  const std::vector<SemanticLabel> pred{1, 0, 3, 3};
  const std::vector<SemanticLabel> gt{1, 1, 0, 2};
  const auto m = confusion(pred, gt);
  CHECK(m.total() == 3);
  CHECK(m.unassigned[0] == 1);
  CHECK(m.row_sum(0) == 2);
  CHECK(m.col_sum(2) == 1);
  const auto iou = iou_per_class(m);
  CHECK(*iou[0] == 0.5);
  CHECK(*iou[2] == 0.0);  // predicted only: present with IoU 0
  CHECK(overall_accuracy(m) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("empty evaluations") {
  const std::vector<SemanticLabel> zeros{0, 0};
  CHECK_THROWS_AS(overall_accuracy(confusion(zeros, zeros)), DataError);
  CHECK_FALSE(mean_iou(ClassIoU{}));
  const std::vector<SemanticLabel> one{1};
  CHECK_THROWS_AS(confusion(one, zeros), DataError);
}

TEST_CASE("random pairs match a direct recount") {
  std::mt19937 rng(4);
  std::uniform_int_distribution<int> label(0, 8);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<SemanticLabel> pred(300), gt(300);
    for (auto& v : pred) v = static_cast<SemanticLabel>(label(rng));
    for (auto& v : gt) v = static_cast<SemanticLabel>(label(rng));
    const auto report = evaluate(pred, gt);
    for (int c = 1; c <= 8; ++c) {
      std::uint64_t inter = 0, uni = 0;
      for (std::size_t i = 0; i < pred.size(); ++i) {
        if (gt[i] == 0) continue;
        inter += gt[i] == c && pred[i] == c;
        uni += gt[i] == c || pred[i] == c;
      }
      if (uni == 0) {
        CHECK_FALSE(report.iou[c - 1]);
      } else {
        CHECK(*report.iou[c - 1] == double(inter) / double(uni));
      }
    }
  }
}

TEST_CASE("report formats") {
  std::vector<SemanticLabel> pred, gt;
  append(pred, gt, 1, 1, 50);
  append(pred, gt, 2, 1, 10);
  append(pred, gt, 1, 2, 5);
  append(pred, gt, 2, 2, 35);
  const auto r = evaluate(pred, gt);
  const auto kv = format_report_kv(r);
  CHECK(kv.find("overall_accuracy = 0.84999999999999998") != std::string::npos);
  CHECK(kv.find("iou3 = absent") != std::string::npos);
  const auto text = format_report_text(r);
  CHECK(text.find("0.850000") != std::string::npos);
  CHECK(text.find("Avg IoU") != std::string::npos);
}
