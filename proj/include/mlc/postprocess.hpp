#pragma once

#include "mlc/geometry.hpp"
#include "mlc/types.hpp"

#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace mlc {

/// One detector output box, pre- or post-NMS.
struct Detection {
  int id = 0;          // unique within the processed list; breaks rank ties
  int image_id = 0;
  int cls = 0;
  Box box;
  Scalar score = 0;    // ranking quality; set by nms() from its mode
  Scalar raw_conf = 0;
  std::optional<Scalar> iou_pred;
};

enum class NmsMode { Standard, Rescored, IouNms };

struct NmsConfig {
  Scalar iou_threshold = 0.5;
  NmsMode mode = NmsMode::Standard;
  int max_out = 100;   // <= 0 means unlimited

  void validate() const;
};

/// Quality score used by the rescored mode: confidence times predicted IoU.
inline Scalar fuse_score(Scalar raw_conf, Scalar iou_pred) {
  return raw_conf * iou_pred;
}

/// Greedy NMS over one class group (the caller groups by image and class;
/// proposals may pass a class-agnostic list).
///
/// Ranking key: standard = raw_conf, rescored = raw_conf * iou_pred,
/// iou-nms = iou_pred alone. A surviving box suppresses every remaining box
/// with iou >= iou_threshold. Output is ordered by descending ranking key,
/// ties to the lowest id, and carries the ranking key in `score`; in iou-nms
/// mode the survivor additionally keeps the maximum raw_conf of its
/// suppressed group. Modes that rank on iou_pred throw DataError when a
/// detection lacks one.
std::vector<Detection> nms(const std::vector<Detection>& dets,
                           const NmsConfig& cfg);

/// Average ranks (1-based, ties share the mean of their positions).
std::vector<Scalar> average_ranks(std::span<const Scalar> values);

struct SpearmanResult {
  Scalar value = 0;
  bool degenerate = false;  // a variable had zero rank variance
};

/// Spearman rank correlation between confidence and IoU over matched
/// candidate pairs; the divergence metric. Throws std::invalid_argument for
/// fewer than 2 pairs; constant inputs return a flagged 0.
SpearmanResult divergence_metric(
    std::span<const std::pair<Scalar, Scalar>> pairs);

/// One matched pre-NMS candidate: confidence on the ground-truth class and
/// IoU of the predicted box with that ground truth.
struct DivergencePair {
  int image_id = 0;
  int object_id = 0;
  Scalar confidence = 0;
  Scalar iou = 0;
};

/// Divergence over all pairs pooled across images and objects.
SpearmanResult pooled_divergence(std::span<const DivergencePair> pairs);

/// Mean of the per-object correlations, over objects with at least two
/// pairs and non-degenerate ranks; degenerate when no object qualifies.
SpearmanResult per_object_divergence(std::span<const DivergencePair> pairs);

}  // namespace mlc
