// Brute-force reference implementations used as test oracles. These are
// written directly from the definitions (no sharing with the library code
// paths they check) and favor obviousness over speed.
#pragma once

#include "mlc/eval.hpp"
#include "mlc/geometry.hpp"
#include "mlc/postprocess.hpp"
#include "mlc/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace oracle {

using mlc::Box;
using mlc::Detection;
using mlc::Scalar;

// Otsu by exhaustive search: every distinct value is a candidate cut, class
// statistics recomputed from scratch per cut, ties to the smaller threshold.
inline Scalar brute_otsu(const std::vector<Scalar>& values) {
  Scalar best_t = values.front();
  Scalar best_var = -1;
  std::vector<Scalar> cuts;
  for (Scalar v : values) {
    bool seen = false;
    for (Scalar c : cuts) seen = seen || c == v;
    if (!seen) cuts.push_back(v);
  }
  std::sort(cuts.begin(), cuts.end());
  for (Scalar t : cuts) {
    Scalar sum0 = 0, sum1 = 0;
    int n0 = 0, n1 = 0;
    for (Scalar v : values) {
      if (v <= t) {
        sum0 += v;
        ++n0;
      } else {
        sum1 += v;
        ++n1;
      }
    }
    Scalar var = 0;
    if (n0 > 0 && n1 > 0) {
      const Scalar w0 = Scalar(n0) / Scalar(values.size());
      const Scalar w1 = Scalar(n1) / Scalar(values.size());
      const Scalar mu0 = sum0 / Scalar(n0);
      const Scalar mu1 = sum1 / Scalar(n1);
      var = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
    }
    if (var > best_var) {
      best_var = var;
      best_t = t;
    }
  }
  return best_t;
}

// Greedy NMS straight from the rules: repeatedly select the best remaining
// detection by ranking key (ties to the lowest id), drop everything it
// overlaps at or above the threshold.
inline std::vector<Detection> brute_nms(std::vector<Detection> dets,
                                        const mlc::NmsConfig& cfg) {
  const auto key = [&](const Detection& d) -> Scalar {
    if (cfg.mode == mlc::NmsMode::Standard) return d.raw_conf;
    if (cfg.mode == mlc::NmsMode::Rescored) return d.raw_conf * *d.iou_pred;
    return *d.iou_pred;
  };

  std::vector<Detection> out;
  std::vector<bool> gone(dets.size(), false);
  while (true) {
    if (cfg.max_out > 0 && static_cast<int>(out.size()) >= cfg.max_out) break;
    int best = -1;
    for (std::size_t i = 0; i < dets.size(); ++i) {
      if (gone[i]) continue;
      if (best < 0 || key(dets[i]) > key(dets[best]) ||
          (key(dets[i]) == key(dets[best]) && dets[i].id < dets[best].id))
        best = static_cast<int>(i);
    }
    if (best < 0) break;
    gone[best] = true;
    Detection kept = dets[best];
    Scalar best_conf = kept.raw_conf;
    for (std::size_t i = 0; i < dets.size(); ++i) {
      if (gone[i]) continue;
      if (mlc::iou(kept.box, dets[i].box) >= cfg.iou_threshold) {
        gone[i] = true;
        if (dets[i].raw_conf > best_conf) best_conf = dets[i].raw_conf;
      }
    }
    if (cfg.mode == mlc::NmsMode::IouNms) kept.raw_conf = best_conf;
    kept.score = key(dets[best]);
    out.push_back(kept);
  }
  return out;
}

// Interpolated AP from TP flags (rank order): for every sampled recall, scan
// all PR points for the maximum precision at recall >= r.
inline Scalar brute_ap(const std::vector<char>& tp, int n_gt, int points) {
  if (n_gt <= 0) {
    if (tp.empty()) return std::numeric_limits<Scalar>::quiet_NaN();
    return 0;
  }
  std::vector<Scalar> precision, recall;
  int hits = 0;
  for (std::size_t i = 0; i < tp.size(); ++i) {
    if (tp[i]) ++hits;
    precision.push_back(Scalar(hits) / Scalar(i + 1));
    recall.push_back(Scalar(hits) / Scalar(n_gt));
  }
  Scalar total = 0;
  for (int s = 0; s < points; ++s) {
    const Scalar r = Scalar(s) / Scalar(points - 1);
    Scalar best = 0;
    for (std::size_t i = 0; i < precision.size(); ++i)
      if (recall[i] >= r && precision[i] > best) best = precision[i];
    total += best;
  }
  return total / Scalar(points);
}

// Average ranks by the counting formula: rank = #smaller + (#equal + 1)/2.
inline std::vector<Scalar> brute_ranks(const std::vector<Scalar>& v) {
  std::vector<Scalar> ranks(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    int smaller = 0, equal = 0;
    for (Scalar x : v) {
      if (x < v[i]) ++smaller;
      if (x == v[i]) ++equal;
    }
    ranks[i] = Scalar(smaller) + 0.5 * Scalar(equal + 1);
  }
  return ranks;
}

struct BruteSpearman {
  Scalar value = 0;
  bool degenerate = false;
};

inline BruteSpearman brute_spearman(const std::vector<Scalar>& x,
                                    const std::vector<Scalar>& y) {
  const std::vector<Scalar> rx = brute_ranks(x);
  const std::vector<Scalar> ry = brute_ranks(y);
  const std::size_t n = x.size();
  Scalar mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= Scalar(n);
  my /= Scalar(n);
  Scalar sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx <= 0 || syy <= 0) return {0, true};
  return {sxy / std::sqrt(sxx * syy), false};
}

// Greedy detection-to-gt matching straight from the definition.
inline std::vector<char> brute_match(const std::vector<Detection>& dets,
                                     const std::vector<int>& ranking,
                                     const std::vector<mlc::GtRecord>& gts,
                                     Scalar iou_t, bool class_agnostic) {
  std::vector<char> used(gts.size(), 0), tp(ranking.size(), 0);
  for (std::size_t r = 0; r < ranking.size(); ++r) {
    const Detection& d = dets[ranking[r]];
    int best = -1;
    Scalar best_iou = 0;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (used[g] || gts[g].image_id != d.image_id) continue;
      if (!class_agnostic && gts[g].cls != d.cls) continue;
      const Scalar v = mlc::iou(d.box, gts[g].box);
      if (v > best_iou) {
        best_iou = v;
        best = static_cast<int>(g);
      }
    }
    if (best >= 0 && best_iou >= iou_t) {
      used[best] = 1;
      tp[r] = 1;
    }
  }
  return tp;
}

}  // namespace oracle
