#pragma once

#include "mlc/geometry.hpp"
#include "mlc/postprocess.hpp"
#include "mlc/types.hpp"

#include <map>
#include <span>
#include <vector>

namespace mlc {

struct EvalConfig {
  std::vector<Scalar> iou_thresholds;  // strictly increasing, in (0,1]
  int recall_points = 101;
  std::vector<int> ar_limits;          // top-k cutoffs for average recall

  static EvalConfig defaults();        // 0.50:0.05:0.95, 101, {100,300,1000}
  void validate() const;
};

/// Ground-truth object as seen by the evaluator.
struct GtRecord {
  int image_id = 0;
  int object_id = 0;
  int cls = 0;
  Box box;
};

struct EvalReport {
  Scalar ap = 0;
  std::vector<std::pair<Scalar, Scalar>> ap_per_threshold;  // (t, AP_t)
  std::map<int, Scalar> ar_at_k;
  Scalar divergence = 0;
  bool divergence_degenerate = false;

  Scalar ap_at(Scalar threshold) const;  // NaN when absent
};

/// Detection indices sorted by descending score, ties to the lowest id.
std::vector<int> score_ranking(const std::vector<Detection>& dets);

/// Greedy TP/FP flags in ranking order: each detection matches its best
/// still-unmatched ground truth of the same image (and class, unless
/// class_agnostic), and is a TP iff that IoU reaches iou_t.
std::vector<char> match_detections(const std::vector<Detection>& dets,
                                   std::span<const int> ranking,
                                   const std::vector<GtRecord>& gts,
                                   Scalar iou_t,
                                   bool class_agnostic = false);

/// Interpolated average precision from TP flags in ranking order: the
/// monotone precision envelope sampled at `recall_points` evenly spaced
/// recall values. Returns 0 when n_gt is 0 but detections exist, and NaN
/// (undefined, excluded from means) when both are absent.
Scalar average_precision(std::span<const char> tp_flags, int n_gt,
                         const EvalConfig& cfg);

/// Class-agnostic recall of the top-k detections per image, averaged over
/// the config's IoU thresholds. NaN when there is no ground truth.
Scalar average_recall(const std::vector<Detection>& dets_per_image,
                      const std::vector<GtRecord>& gts, int k,
                      const EvalConfig& cfg);

/// Mean AP over classes present in the ground truth and over all configured
/// IoU thresholds; fills ap and ap_per_threshold of the report.
EvalReport evaluate_detections(const std::vector<Detection>& dets,
                               const std::vector<GtRecord>& gts,
                               const EvalConfig& cfg);

}  // namespace mlc
