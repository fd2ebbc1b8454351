#include "mlc/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace mlc {

void NmsConfig::validate() const {
  if (!(iou_threshold > 0 && iou_threshold <= 1))
    throw ConfigError("nms.iou_threshold must lie in (0, 1]");
}

namespace {

Scalar ranking_key(const Detection& d, NmsMode mode) {
  switch (mode) {
    case NmsMode::Standard:
      return d.raw_conf;
    case NmsMode::Rescored:
      if (!d.iou_pred)
        throw DataError("nms: rescored mode requires iou_pred on detection " +
                        std::to_string(d.id));
      return fuse_score(d.raw_conf, *d.iou_pred);
    case NmsMode::IouNms:
      if (!d.iou_pred)
        throw DataError("nms: iou-nms mode requires iou_pred on detection " +
                        std::to_string(d.id));
      return *d.iou_pred;
  }
  return 0;
}

}  // namespace

std::vector<Detection> nms(const std::vector<Detection>& dets,
                           const NmsConfig& cfg) {
  cfg.validate();
  const std::size_t n = dets.size();
  std::vector<Scalar> key(n);
  for (std::size_t i = 0; i < n; ++i) key[i] = ranking_key(dets[i], cfg.mode);

  std::vector<char> alive(n, 1);
  std::vector<Detection> out;
  const std::size_t limit =
      cfg.max_out > 0 ? static_cast<std::size_t>(cfg.max_out) : n;

  while (out.size() < limit) {
    int pick = -1;
    for (std::size_t i = 0; i < n; ++i) {
      if (!alive[i]) continue;
      if (pick < 0 || key[i] > key[pick] ||
          (key[i] == key[pick] && dets[i].id < dets[pick].id))
        pick = static_cast<int>(i);
    }
    if (pick < 0) break;

    alive[pick] = 0;
    Detection kept = dets[pick];
    Scalar cluster_conf = kept.raw_conf;
    for (std::size_t i = 0; i < n; ++i) {
      if (!alive[i]) continue;
      if (iou(kept.box, dets[i].box) >= cfg.iou_threshold) {
        alive[i] = 0;
        cluster_conf = std::max(cluster_conf, dets[i].raw_conf);
      }
    }
    // The survivor carries the ranking key as its quality score; in iou-nms
    // mode it additionally keeps the best classification confidence of its
    // suppressed group (the IoU-Net confidence update).
    if (cfg.mode == NmsMode::IouNms) kept.raw_conf = cluster_conf;
    kept.score = key[pick];
    out.push_back(std::move(kept));
  }
  return out;
}

std::vector<Scalar> average_ranks(std::span<const Scalar> values) {
  const std::size_t n = values.size();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return values[a] < values[b]; });

  std::vector<Scalar> ranks(n, 0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    // Positions i..j (0-based) share the mean 1-based rank.
    const Scalar mean_rank = 0.5 * static_cast<Scalar>(i + j) + 1;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mean_rank;
    i = j + 1;
  }
  return ranks;
}

SpearmanResult divergence_metric(
    std::span<const std::pair<Scalar, Scalar>> pairs) {
  if (pairs.size() < 2)
    throw std::invalid_argument("divergence_metric: needs at least 2 pairs");

  const std::size_t n = pairs.size();
  std::vector<Scalar> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = pairs[i].first;
    ys[i] = pairs[i].second;
  }
  const std::vector<Scalar> rx = average_ranks(xs);
  const std::vector<Scalar> ry = average_ranks(ys);

  Scalar mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= static_cast<Scalar>(n);
  my /= static_cast<Scalar>(n);

  Scalar sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx <= 0 || syy <= 0) return {0, true};
  return {sxy / std::sqrt(sxx * syy), false};
}

SpearmanResult pooled_divergence(std::span<const DivergencePair> pairs) {
  std::vector<std::pair<Scalar, Scalar>> xy;
  xy.reserve(pairs.size());
  for (const auto& p : pairs) xy.emplace_back(p.confidence, p.iou);
  if (xy.size() < 2) return {0, true};
  return divergence_metric(xy);
}

SpearmanResult per_object_divergence(std::span<const DivergencePair> pairs) {
  std::map<std::pair<int, int>, std::vector<std::pair<Scalar, Scalar>>> groups;
  for (const auto& p : pairs)
    groups[{p.image_id, p.object_id}].emplace_back(p.confidence, p.iou);

  Scalar sum = 0;
  int count = 0;
  for (const auto& [key, xy] : groups) {
    if (xy.size() < 2) continue;
    const SpearmanResult r = divergence_metric(xy);
    if (r.degenerate) continue;
    sum += r.value;
    ++count;
  }
  if (count == 0) return {0, true};
  return {sum / static_cast<Scalar>(count), false};
}

}  // namespace mlc
