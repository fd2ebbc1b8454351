#include "mlc/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

namespace mlc {

EvalConfig EvalConfig::defaults() {
  EvalConfig cfg;
  for (int i = 0; i < 10; ++i)
    cfg.iou_thresholds.push_back(0.5 + 0.05 * static_cast<Scalar>(i));
  cfg.recall_points = 101;
  cfg.ar_limits = {100, 300, 1000};
  return cfg;
}

void EvalConfig::validate() const {
  if (iou_thresholds.empty())
    throw ConfigError("eval.iou_thresholds must be non-empty");
  for (std::size_t i = 0; i < iou_thresholds.size(); ++i) {
    const Scalar t = iou_thresholds[i];
    if (!(t > 0 && t <= 1))
      throw ConfigError("eval.iou_thresholds entries must lie in (0, 1]");
    if (i > 0 && t <= iou_thresholds[i - 1])
      throw ConfigError("eval.iou_thresholds must be strictly increasing");
  }
  if (recall_points < 2)
    throw ConfigError("eval.recall_points must be >= 2");
  for (int k : ar_limits)
    if (k < 1) throw ConfigError("eval.ar_limits entries must be >= 1");
}

Scalar EvalReport::ap_at(Scalar threshold) const {
  for (const auto& [t, v] : ap_per_threshold)
    if (std::abs(t - threshold) < 1e-9) return v;
  return std::numeric_limits<Scalar>::quiet_NaN();
}

std::vector<int> score_ranking(const std::vector<Detection>& dets) {
  std::vector<int> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (dets[a].score != dets[b].score) return dets[a].score > dets[b].score;
    return dets[a].id < dets[b].id;
  });
  return order;
}

std::vector<char> match_detections(const std::vector<Detection>& dets,
                                   std::span<const int> ranking,
                                   const std::vector<GtRecord>& gts,
                                   Scalar iou_t,
                                   bool class_agnostic) {
  std::vector<char> matched_gt(gts.size(), 0);
  std::vector<char> tp(ranking.size(), 0);

  for (std::size_t r = 0; r < ranking.size(); ++r) {
    const Detection& d = dets[ranking[r]];
    Scalar best = 0;
    int best_gt = -1;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (matched_gt[g]) continue;
      if (gts[g].image_id != d.image_id) continue;
      if (!class_agnostic && gts[g].cls != d.cls) continue;
      const Scalar v = iou(d.box, gts[g].box);
      if (v > best) {
        best = v;
        best_gt = static_cast<int>(g);
      }
    }
    if (best_gt >= 0 && best >= iou_t) {
      matched_gt[best_gt] = 1;
      tp[r] = 1;
    }
  }
  return tp;
}

Scalar average_precision(std::span<const char> tp_flags, int n_gt,
                         const EvalConfig& cfg) {
  if (n_gt <= 0) {
    if (tp_flags.empty()) return std::numeric_limits<Scalar>::quiet_NaN();
    return 0;
  }

  const std::size_t n = tp_flags.size();
  std::vector<Scalar> precision(n), recall(n);
  int tp = 0;
  for (std::size_t i = 0; i < n; ++i) {
    tp += tp_flags[i] ? 1 : 0;
    precision[i] = static_cast<Scalar>(tp) / static_cast<Scalar>(i + 1);
    recall[i] = static_cast<Scalar>(tp) / static_cast<Scalar>(n_gt);
  }

  // Monotone non-increasing precision envelope.
  for (std::size_t i = n; i-- > 1;)
    precision[i - 1] = std::max(precision[i - 1], precision[i]);

  Scalar sum = 0;
  const int points = cfg.recall_points;
  for (int s = 0; s < points; ++s) {
    const Scalar r = static_cast<Scalar>(s) / static_cast<Scalar>(points - 1);
    // First rank reaching recall r; envelope precision there, 0 if never.
    std::size_t idx = 0;
    while (idx < n && recall[idx] < r) ++idx;
    if (idx < n) sum += precision[idx];
  }
  return sum / static_cast<Scalar>(points);
}

Scalar average_recall(const std::vector<Detection>& dets_per_image,
                      const std::vector<GtRecord>& gts, int k,
                      const EvalConfig& cfg) {
  cfg.validate();
  if (gts.empty()) return std::numeric_limits<Scalar>::quiet_NaN();
  if (k < 1) throw std::invalid_argument("average_recall: k must be >= 1");

  // Top-k per image by (score, id) rank.
  std::map<int, std::vector<Detection>> by_image;
  for (const auto& d : dets_per_image) by_image[d.image_id].push_back(d);

  std::vector<Detection> kept;
  for (auto& [image_id, dets] : by_image) {
    const std::vector<int> order = score_ranking(dets);
    const std::size_t take = std::min<std::size_t>(order.size(), k);
    for (std::size_t i = 0; i < take; ++i) kept.push_back(dets[order[i]]);
  }

  const std::vector<int> order = score_ranking(kept);
  Scalar recall_sum = 0;
  for (Scalar t : cfg.iou_thresholds) {
    const std::vector<char> tp =
        match_detections(kept, order, gts, t, /*class_agnostic=*/true);
    const long matched = std::count(tp.begin(), tp.end(), char(1));
    recall_sum += static_cast<Scalar>(matched) / static_cast<Scalar>(gts.size());
  }
  return recall_sum / static_cast<Scalar>(cfg.iou_thresholds.size());
}

EvalReport evaluate_detections(const std::vector<Detection>& dets,
                               const std::vector<GtRecord>& gts,
                               const EvalConfig& cfg) {
  cfg.validate();
  EvalReport report;

  std::set<int> classes;
  for (const auto& g : gts) classes.insert(g.cls);

  // Pre-split detections and ground truth per class; AP averages over the
  // classes present in the ground truth only.
  std::map<int, std::vector<Detection>> dets_by_class;
  std::map<int, std::vector<GtRecord>> gts_by_class;
  for (const auto& d : dets)
    if (classes.count(d.cls)) dets_by_class[d.cls].push_back(d);
  for (const auto& g : gts) gts_by_class[g.cls].push_back(g);

  Scalar ap_sum = 0;
  for (Scalar t : cfg.iou_thresholds) {
    Scalar class_sum = 0;
    int class_count = 0;
    for (int c : classes) {
      const auto& cdets = dets_by_class[c];
      const auto& cgts = gts_by_class[c];
      const std::vector<int> order = score_ranking(cdets);
      const std::vector<char> tp = match_detections(cdets, order, cgts, t);
      const Scalar ap = average_precision(tp, static_cast<int>(cgts.size()), cfg);
      if (!std::isnan(ap)) {
        class_sum += ap;
        ++class_count;
      }
    }
    const Scalar ap_t = class_count > 0 ? class_sum / class_count : 0;
    report.ap_per_threshold.emplace_back(t, ap_t);
    ap_sum += ap_t;
  }
  report.ap = ap_sum / static_cast<Scalar>(cfg.iou_thresholds.size());
  return report;
}

}  // namespace mlc
