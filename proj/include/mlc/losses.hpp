#pragma once

#include "mlc/assignment.hpp"
#include "mlc/model.hpp"
#include "mlc/types.hpp"

#include <span>
#include <vector>

namespace mlc {

struct LossConfig {
  enum class LocLossKind { SmoothL1, Iou };

  Scalar gamma = 1.0;                 // IoU-rescoring loss weight
  LocLossKind loc_loss = LocLossKind::SmoothL1;
  Scalar smooth_l1_beta = 1.0;

  void validate() const;
};

struct LossBreakdown {
  Scalar l_cls = 0;
  Scalar l_loc = 0;
  Scalar l_iur = 0;
  Scalar total = 0;   // l_cls + l_loc + gamma * l_iur
  HeadGrads grads;
};

/// Weighted mean binary cross-entropy over the sample set. Members of
/// `positives` train toward one-hot on their object's class; every other
/// member of `set` trains all-negative. Probabilities are clamped to
/// [1e-7, 1 - 1e-7]. Gradients (scaled by grad_scale) accumulate into
/// *grads when non-null. Throws std::invalid_argument on an empty set.
Scalar cls_loss(const std::vector<Candidate>& cands,
                const std::vector<VectorX>& feats,
                const std::vector<GroundTruth>& gts,
                std::span<const int> set,
                std::span<const int> positives,
                std::span<const Scalar> w_cls,
                const HeadParams& params,
                HeadGrads* grads = nullptr,
                Scalar grad_scale = 1);

/// Weighted mean localization loss over `set`; smooth-L1 acts on the
/// encode-space residual, the IoU variant is 1 - iou(decoded box, target).
/// Every member must carry a matched object.
Scalar loc_loss(const std::vector<Candidate>& cands,
                const std::vector<VectorX>& feats,
                const std::vector<GroundTruth>& gts,
                std::span<const int> set,
                std::span<const Scalar> w_loc,
                const LossConfig& cfg,
                const HeadParams& params,
                HeadGrads* grads = nullptr,
                Scalar grad_scale = 1);

/// Mean squared error between the predicted IoU and the IoU of the
/// candidate's stored box with its target, the latter treated as a constant
/// (no gradient flows through the target).
Scalar iur_loss(const std::vector<Candidate>& cands,
                const std::vector<VectorX>& feats,
                const std::vector<GroundTruth>& gts,
                std::span<const int> set,
                const HeadParams& params,
                HeadGrads* grads = nullptr,
                Scalar grad_scale = 1);

/// Full training objective:
///   L = L_cls(A+cls u A-cls u A-) + L_loc(A+loc) + gamma * L_iur(A+cls u A+loc)
/// with gradients for every head parameter. gamma = 0 skips the IoU term.
LossBreakdown mlc_total(const std::vector<Candidate>& cands,
                        const std::vector<VectorX>& feats,
                        const std::vector<GroundTruth>& gts,
                        const AssignmentResult& assignment,
                        const HeadParams& params,
                        const LossConfig& cfg);

}  // namespace mlc
