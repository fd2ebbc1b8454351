#include "mlc/assignment.hpp"

#include "mlc/thresholding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mlc {

void AssignmentConfig::validate() const {
  if (alpha < 0) throw ConfigError("assignment.alpha must be >= 0");
  if (matcher == MatcherKind::IouBand &&
      !(0 <= band_low && band_low <= band_high && band_high <= 1))
    throw ConfigError("assignment.iou_band must satisfy 0 <= low <= high <= 1");
  if (min_candidates < 1)
    throw ConfigError("assignment.min_candidates must be >= 1");
}

Grouping match_candidates(std::vector<Candidate>& cands,
                          const std::vector<GroundTruth>& gts,
                          const AssignmentConfig& cfg) {
  cfg.validate();
  Grouping g;
  for (const auto& gt : gts) g.members[gt.id];

  for (std::size_t j = 0; j < cands.size(); ++j) {
    auto& cand = cands[j];
    cand.matched_object.reset();
    cand.origin = Origin::Negative;

    if (cfg.matcher == MatcherKind::IouBand) {
      Scalar best = -1;
      int best_gt = -1;
      for (const auto& gt : gts) {
        const Scalar v = iou(cand.prior, gt.box);
        if (v > best || (v == best && best_gt >= 0 && gt.id < best_gt)) {
          best = v;
          best_gt = gt.id;
        }
      }
      if (best_gt >= 0 && best >= cfg.band_low) {
        cand.matched_object = best_gt;
        cand.origin =
            best >= cfg.band_high ? Origin::CorePositive : Origin::Ignored;
        g.members[best_gt].push_back(static_cast<int>(j));
        continue;
      }
    } else {
      const Scalar px = cand.prior.cx(), py = cand.prior.cy();
      Scalar best_area = std::numeric_limits<Scalar>::infinity();
      int best_gt = -1;
      for (const auto& gt : gts) {
        if (!gt.box.contains(px, py)) continue;
        const Scalar a = gt.box.area();
        if (a < best_area || (a == best_area && best_gt >= 0 && gt.id < best_gt)) {
          best_area = a;
          best_gt = gt.id;
        }
      }
      if (best_gt >= 0) {
        cand.matched_object = best_gt;
        cand.origin = Origin::CorePositive;
        g.members[best_gt].push_back(static_cast<int>(j));
        continue;
      }
    }
    g.background.push_back(static_cast<int>(j));
  }
  return g;
}

namespace {

// Force the positive set to hold at least min(want, n) members, adding
// candidates in descending quality order, ties to the lowest index.
void rescue(std::vector<int>& pos, std::vector<int>& neg,
            std::span<const Scalar> quality, int want) {
  const int n = static_cast<int>(quality.size());
  want = std::min(want, n);
  if (static_cast<int>(pos.size()) >= want) return;

  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return quality[a] > quality[b];
  });

  std::vector<bool> is_pos(n, false);
  for (int i : pos) is_pos[i] = true;
  for (int i : order) {
    if (static_cast<int>(pos.size()) >= want) break;
    if (is_pos[i]) continue;
    is_pos[i] = true;
    pos.push_back(i);
  }
  std::sort(pos.begin(), pos.end());
  neg.clear();
  for (int i = 0; i < n; ++i)
    if (!is_pos[i]) neg.push_back(i);
}

}  // namespace

ObjectLabels mutual_label_object(std::span<const Scalar> ious,
                                 std::span<const Scalar> scores,
                                 int min_positives) {
  if (ious.size() != scores.size())
    throw std::invalid_argument("mutual_label_object: size mismatch");
  if (ious.empty())
    throw std::invalid_argument("mutual_label_object: empty group");

  ObjectLabels out;
  out.tau_loc = otsu_threshold(ious);
  out.tau_cls = otsu_threshold(scores);

  // Crossing: classification labels come from IoUs, localization labels
  // from scores.
  SplitResult cls = split(ious, out.tau_loc);
  out.pos_cls = std::move(cls.above);
  out.neg_cls = std::move(cls.below);
  SplitResult loc = split(scores, out.tau_cls);
  out.pos_loc = std::move(loc.above);

  rescue(out.pos_cls, out.neg_cls, ious, min_positives);
  std::vector<int> unused;
  rescue(out.pos_loc, unused, scores, min_positives);
  return out;
}

AssignmentResult mutual_label(const Grouping& grouping,
                              const std::vector<Candidate>& cands,
                              const std::vector<GroundTruth>& gts,
                              const AssignmentConfig& cfg) {
  const std::size_t n = cands.size();
  AssignmentResult r;
  r.w_cls.assign(n, 1);
  r.w_loc.assign(n, 1);
  r.iou_quality.assign(n, std::numeric_limits<Scalar>::quiet_NaN());
  r.score_quality.assign(n, std::numeric_limits<Scalar>::quiet_NaN());
  r.background = grouping.background;

  std::map<int, const GroundTruth*> by_id;
  for (const auto& gt : gts) by_id[gt.id] = &gt;

  for (const auto& [gt_id, members] : grouping.members) {
    if (members.empty()) continue;
    const GroundTruth& gt = *by_id.at(gt_id);

    // Member lists are ordered by ascending candidate index, which the
    // matcher produces in ascending id order, so local argmax tie-breaks
    // resolve to the lowest candidate id.
    std::vector<int> order(members);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return cands[a].id < cands[b].id;
    });

    std::vector<Scalar> ious_k(order.size()), scores_k(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
      const Candidate& c = cands[order[i]];
      if (gt.label < 0 || gt.label >= c.class_scores.size())
        throw std::out_of_range(
            "mutual_label: candidate lacks a score for its object's class");
      ious_k[i] = iou(c.box, gt.box);
      scores_k[i] = c.class_scores[gt.label];
    }

    ObjectLabels labels =
        mutual_label_object(ious_k, scores_k, cfg.min_candidates);
    r.tau_loc[gt_id] = labels.tau_loc;
    r.tau_cls[gt_id] = labels.tau_cls;
    for (int i : labels.pos_cls) r.pos_cls.push_back(order[i]);
    for (int i : labels.neg_cls) r.neg_cls.push_back(order[i]);
    for (int i : labels.pos_loc) r.pos_loc.push_back(order[i]);
    for (std::size_t i = 0; i < order.size(); ++i) {
      r.iou_quality[order[i]] = ious_k[i];
      r.score_quality[order[i]] = scores_k[i];
    }
  }

  std::sort(r.pos_cls.begin(), r.pos_cls.end());
  std::sort(r.neg_cls.begin(), r.neg_cls.end());
  std::sort(r.pos_loc.begin(), r.pos_loc.end());
  return r;
}

void ignored_weights(AssignmentResult& result,
                     const Grouping& grouping,
                     const std::vector<Candidate>& cands,
                     const AssignmentConfig& cfg) {
  // |q - tau|^alpha with the 0^0 = 1 convention, so alpha = 0 keeps
  // uniform weights.
  const auto margin_pow = [&](Scalar q, Scalar tau) {
    if (cfg.alpha == 0) return Scalar(1);
    return std::pow(std::abs(q - tau), cfg.alpha);
  };

  for (const auto& [gt_id, members] : grouping.members) {
    for (int j : members) {
      if (cands[j].origin != Origin::Ignored) continue;
      result.w_cls[j] = margin_pow(result.iou_quality[j], result.tau_loc.at(gt_id));
      result.w_loc[j] = margin_pow(result.score_quality[j], result.tau_cls.at(gt_id));
    }
  }
}

AssignmentResult baseline_label(const Grouping& grouping,
                                const std::vector<Candidate>& cands,
                                const std::vector<GroundTruth>& gts) {
  const std::size_t n = cands.size();
  AssignmentResult r;
  r.w_cls.assign(n, 1);
  r.w_loc.assign(n, 1);
  r.iou_quality.assign(n, std::numeric_limits<Scalar>::quiet_NaN());
  r.score_quality.assign(n, std::numeric_limits<Scalar>::quiet_NaN());
  r.background = grouping.background;

  std::map<int, const GroundTruth*> by_id;
  for (const auto& gt : gts) by_id[gt.id] = &gt;

  for (const auto& [gt_id, members] : grouping.members) {
    const GroundTruth& gt = *by_id.at(gt_id);
    for (int j : members) {
      if (gt.label >= 0 && gt.label < cands[j].class_scores.size()) {
        r.iou_quality[j] = iou(cands[j].box, gt.box);
        r.score_quality[j] = cands[j].class_scores[gt.label];
      }
      if (cands[j].origin == Origin::CorePositive) {
        r.pos_cls.push_back(j);
        r.pos_loc.push_back(j);
      }
      // Ignored members stay out of every set, as in the pre-mutual-labeling
      // recipe that simply drops ambiguous samples.
    }
  }
  std::sort(r.pos_cls.begin(), r.pos_cls.end());
  std::sort(r.pos_loc.begin(), r.pos_loc.end());
  return r;
}

}  // namespace mlc
