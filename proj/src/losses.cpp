#include "mlc/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mlc {

void LossConfig::validate() const {
  if (gamma < 0) throw ConfigError("losses.gamma must be >= 0");
  if (smooth_l1_beta <= 0) throw ConfigError("losses.smooth_l1_beta must be > 0");
}

namespace {

constexpr Scalar kBceEps = 1e-7;

const GroundTruth& matched_gt(const Candidate& cand,
                              const std::vector<GroundTruth>& gts,
                              const char* who) {
  if (!cand.matched_object)
    throw std::invalid_argument(std::string(who) + ": candidate " +
                                std::to_string(cand.id) +
                                " has no matched object");
  for (const auto& gt : gts)
    if (gt.id == *cand.matched_object) return gt;
  throw std::invalid_argument(std::string(who) + ": matched object id " +
                              std::to_string(*cand.matched_object) +
                              " not found");
}

bool in_sorted(std::span<const int> sorted, int j) {
  return std::binary_search(sorted.begin(), sorted.end(), j);
}

// d(iou)/d(corners) of box b against fixed box g; zero on the
// zero-intersection plateau.
Vector4 iou_corner_grad(const Box& b, const Box& g) {
  const Scalar iw = std::min(b.x2, g.x2) - std::max(b.x1, g.x1);
  const Scalar ih = std::min(b.y2, g.y2) - std::max(b.y1, g.y1);
  if (iw <= 0 || ih <= 0) return Vector4::Zero();
  const Scalar inter = iw * ih;
  const Scalar uni = b.area() + g.area() - inter;
  if (uni <= 0) return Vector4::Zero();

  // dI/d(x1,y1,x2,y2)
  Vector4 dI(b.x1 > g.x1 ? -ih : 0, b.y1 > g.y1 ? -iw : 0,
             b.x2 < g.x2 ? ih : 0, b.y2 < g.y2 ? iw : 0);
  // dArea(b)/d(corners)
  Vector4 dA(-b.height(), -b.width(), b.height(), b.width());
  // iou = I/U, dU = dA - dI
  return (dI * uni - inter * (dA - dI)) / (uni * uni);
}

}  // namespace

Scalar cls_loss(const std::vector<Candidate>& cands,
                const std::vector<VectorX>& feats,
                const std::vector<GroundTruth>& gts,
                std::span<const int> set,
                std::span<const int> positives,
                std::span<const Scalar> w_cls,
                const HeadParams& params,
                HeadGrads* grads,
                Scalar grad_scale) {
  if (set.empty()) throw std::invalid_argument("cls_loss: empty sample set");
  const Scalar inv_n = 1.0 / static_cast<Scalar>(set.size());
  const int classes = params.classes();

  Scalar loss = 0;
  for (int j : set) {
    const Candidate& cand = cands[j];
    int target_class = -1;
    if (in_sorted(positives, j)) {
      const GroundTruth& gt = matched_gt(cand, gts, "cls_loss");
      if (gt.label < 0 || gt.label >= classes)
        throw std::out_of_range("cls_loss: class label out of range");
      target_class = gt.label;
    }
    const Scalar scale = w_cls[j] * inv_n;
    const VectorX z = params.w_cls * feats[j] + params.b_cls;
    for (int c = 0; c < classes; ++c) {
      const Scalar y = c == target_class ? 1.0 : 0.0;
      const Scalar p_raw = sigmoid(z[c]);
      const Scalar p = std::clamp(p_raw, kBceEps, 1 - kBceEps);
      loss -= scale * (y * std::log(p) + (1 - y) * std::log(1 - p));
      if (grads && p_raw > kBceEps && p_raw < 1 - kBceEps) {
        const Scalar dz = grad_scale * scale * (p_raw - y);
        grads->w_cls.row(c) += dz * feats[j].transpose();
        grads->b_cls[c] += dz;
      }
    }
  }
  return loss;
}

Scalar loc_loss(const std::vector<Candidate>& cands,
                const std::vector<VectorX>& feats,
                const std::vector<GroundTruth>& gts,
                std::span<const int> set,
                std::span<const Scalar> w_loc,
                const LossConfig& cfg,
                const HeadParams& params,
                HeadGrads* grads,
                Scalar grad_scale) {
  if (set.empty()) throw std::invalid_argument("loc_loss: empty sample set");
  cfg.validate();
  const Scalar inv_n = 1.0 / static_cast<Scalar>(set.size());
  const Scalar beta = cfg.smooth_l1_beta;

  Scalar loss = 0;
  for (int j : set) {
    const Candidate& cand = cands[j];
    const GroundTruth& gt = matched_gt(cand, gts, "loc_loss");
    const Scalar scale = w_loc[j] * inv_n;
    const Vector4 d = params.w_loc * feats[j] + params.b_loc;

    Vector4 dl_dd = Vector4::Zero();
    if (cfg.loc_loss == LossConfig::LocLossKind::SmoothL1) {
      const Vector4 target = encode(cand.prior, gt.box).as_vector();
      for (int i = 0; i < 4; ++i) {
        const Scalar r = d[i] - target[i];
        if (std::abs(r) < beta) {
          loss += scale * 0.5 * r * r / beta;
          dl_dd[i] = r / beta;
        } else {
          loss += scale * (std::abs(r) - 0.5 * beta);
          dl_dd[i] = r > 0 ? 1 : -1;
        }
      }
    } else {
      const Box b = decode(cand.prior, BoxDelta::from_vector(d));
      loss += scale * (1 - iou(b, gt.box));
      const Vector4 diou = iou_corner_grad(b, gt.box);
      // Corners as functions of the delta: centers shift by prior size,
      // sizes scale exponentially.
      const Scalar pw = cand.prior.width(), ph = cand.prior.height();
      const Scalar w = b.width(), h = b.height();
      dl_dd[0] = -(diou[0] + diou[2]) * pw;
      dl_dd[1] = -(diou[1] + diou[3]) * ph;
      dl_dd[2] = -(-diou[0] + diou[2]) * 0.5 * w;
      dl_dd[3] = -(-diou[1] + diou[3]) * 0.5 * h;
    }

    if (grads) {
      for (int i = 0; i < 4; ++i) {
        const Scalar dz = grad_scale * scale * dl_dd[i];
        grads->w_loc.row(i) += dz * feats[j].transpose();
        grads->b_loc[i] += dz;
      }
    }
  }
  return loss;
}

Scalar iur_loss(const std::vector<Candidate>& cands,
                const std::vector<VectorX>& feats,
                const std::vector<GroundTruth>& gts,
                std::span<const int> set,
                const HeadParams& params,
                HeadGrads* grads,
                Scalar grad_scale) {
  if (set.empty()) throw std::invalid_argument("iur_loss: empty sample set");
  const Scalar inv_n = 1.0 / static_cast<Scalar>(set.size());

  Scalar loss = 0;
  for (int j : set) {
    const Candidate& cand = cands[j];
    const GroundTruth& gt = matched_gt(cand, gts, "iur_loss");
    const Scalar target = iou(cand.box, gt.box);
    const Scalar z = params.w_iur.dot(feats[j]) + params.b_iur;
    const Scalar p = sigmoid(z);
    const Scalar r = p - target;
    loss += inv_n * r * r;
    if (grads) {
      const Scalar dz = grad_scale * inv_n * 2 * r * p * (1 - p);
      grads->w_iur += dz * feats[j].transpose();
      grads->b_iur += dz;
    }
  }
  return loss;
}

LossBreakdown mlc_total(const std::vector<Candidate>& cands,
                        const std::vector<VectorX>& feats,
                        const std::vector<GroundTruth>& gts,
                        const AssignmentResult& assignment,
                        const HeadParams& params,
                        const LossConfig& cfg) {
  cfg.validate();

  // A+cls u A-cls u A-; the three sets are disjoint by construction.
  std::vector<int> cls_set;
  cls_set.reserve(assignment.pos_cls.size() + assignment.neg_cls.size() +
                  assignment.background.size());
  cls_set.insert(cls_set.end(), assignment.pos_cls.begin(), assignment.pos_cls.end());
  cls_set.insert(cls_set.end(), assignment.neg_cls.begin(), assignment.neg_cls.end());
  cls_set.insert(cls_set.end(), assignment.background.begin(), assignment.background.end());
  std::sort(cls_set.begin(), cls_set.end());

  std::vector<int> iur_set;
  std::set_union(assignment.pos_cls.begin(), assignment.pos_cls.end(),
                 assignment.pos_loc.begin(), assignment.pos_loc.end(),
                 std::back_inserter(iur_set));

  if (cls_set.empty())
    throw std::invalid_argument("mlc_total: classification term has an empty sample set");
  if (assignment.pos_loc.empty())
    throw std::invalid_argument("mlc_total: localization term has an empty sample set");

  LossBreakdown out;
  out.grads = HeadParams::zeros(params.classes(), params.dim());
  out.l_cls = cls_loss(cands, feats, gts, cls_set, assignment.pos_cls,
                       assignment.w_cls, params, &out.grads, 1);
  out.l_loc = loc_loss(cands, feats, gts, assignment.pos_loc, assignment.w_loc,
                       cfg, params, &out.grads, 1);
  if (cfg.gamma != 0) {
    if (iur_set.empty())
      throw std::invalid_argument("mlc_total: IoU-rescoring term has an empty sample set");
    out.l_iur = iur_loss(cands, feats, gts, iur_set, params, &out.grads, cfg.gamma);
  }
  out.total = out.l_cls + out.l_loc + cfg.gamma * out.l_iur;
  return out;
}

}  // namespace mlc
