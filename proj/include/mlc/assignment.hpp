#pragma once

#include "mlc/geometry.hpp"
#include "mlc/types.hpp"

#include <map>
#include <optional>
#include <span>
#include <vector>

namespace mlc {

enum class Origin { CorePositive, Ignored, Negative };

/// One prior/sample with its current predictions and assignment state.
struct Candidate {
  int id = 0;
  Box prior;
  VectorX class_scores;          // sigmoid score per class, in [0,1]
  Box box;                       // decoded current box prediction
  Scalar iou_pred = 0;           // predicted IoU, in [0,1]
  std::optional<int> matched_object;
  Origin origin = Origin::Negative;
};

struct GroundTruth {
  int id = 0;
  Box box;
  int label = 0;
};

enum class MatcherKind { IouBand, InsideBox };

struct AssignmentConfig {
  Scalar alpha = 0.5;            // exponent of the ignored-sample weights
  MatcherKind matcher = MatcherKind::IouBand;
  Scalar band_low = 0.4;
  Scalar band_high = 0.5;
  int min_candidates = 1;        // minimum positives per object after rescue

  void validate() const;
};

/// Per-object candidate groups produced by the matcher. Member lists hold
/// indices into the candidate vector, sorted ascending; every ground-truth id
/// has an entry, possibly empty.
struct Grouping {
  std::map<int, std::vector<int>> members;
  std::vector<int> background;
};

/// Sample partition plus loss weights produced by mutual labeling.
struct AssignmentResult {
  std::vector<int> pos_cls;      // A+cls: classification positives
  std::vector<int> neg_cls;      // A-cls: mutually rejected group members
  std::vector<int> pos_loc;      // A+loc: localization positives
  std::vector<int> background;   // A-:    unmatched samples

  std::vector<Scalar> w_cls;     // per-candidate classification weight
  std::vector<Scalar> w_loc;     // per-candidate localization weight

  std::map<int, Scalar> tau_cls; // per-object Otsu threshold over S
  std::map<int, Scalar> tau_loc; // per-object Otsu threshold over I

  // Cached per-candidate qualities (NaN for unmatched candidates):
  // iou_quality[j] = iou(b_j, gt box), score_quality[j] = c_j[gt label].
  std::vector<Scalar> iou_quality;
  std::vector<Scalar> score_quality;
};

/// Assign every candidate to its best ground truth and set its origin.
///
/// iou-band: best-IoU ground truth; IoU >= band_high makes a core positive,
/// [band_low, band_high) an ignored group member, below band_low background.
/// inside-box: prior center inside the box makes a core positive, ambiguity
/// resolved to the smallest-area ground truth.
Grouping match_candidates(std::vector<Candidate>& cands,
                          const std::vector<GroundTruth>& gts,
                          const AssignmentConfig& cfg);

/// Labels for one object's candidate group: positives for classification are
/// chosen by thresholding the IoUs, positives for localization by
/// thresholding the scores (each task labeled by the other's quality).
/// Indices are local to the input spans. If a positive set comes out empty,
/// the argmax candidate of the corresponding quality is forced positive
/// (ties to the lowest index); min_positives > 1 keeps forcing next-best
/// candidates until that many are positive or the group is exhausted.
struct ObjectLabels {
  std::vector<int> pos_cls;
  std::vector<int> neg_cls;
  std::vector<int> pos_loc;
  Scalar tau_loc = 0;
  Scalar tau_cls = 0;
};

ObjectLabels mutual_label_object(std::span<const Scalar> ious,
                                 std::span<const Scalar> scores,
                                 int min_positives = 1);

/// Mutual labeling over all groups. Requires candidates to carry current
/// class_scores and boxes (a forward pass has run). Weights are initialized
/// to 1; apply ignored_weights afterwards for the down-weighting.
AssignmentResult mutual_label(const Grouping& grouping,
                              const std::vector<Candidate>& cands,
                              const std::vector<GroundTruth>& gts,
                              const AssignmentConfig& cfg);

/// Down-weight ignored-origin group members by their margin to the mutual
/// threshold: w_cls = |I_j - tau_loc|^alpha, w_loc = |S_j - tau_cls|^alpha,
/// with 0^0 = 1 so alpha = 0 keeps every weight at 1.
void ignored_weights(AssignmentResult& result,
                     const Grouping& grouping,
                     const std::vector<Candidate>& cands,
                     const AssignmentConfig& cfg);

/// Fixed-threshold baseline: core positives are the only positives for both
/// tasks, ignored members are excluded from all loss sets, weights are 1.
AssignmentResult baseline_label(const Grouping& grouping,
                                const std::vector<Candidate>& cands,
                                const std::vector<GroundTruth>& gts);

}  // namespace mlc
