#include "mlc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mlc {

Scalar iou(const Box& a, const Box& b) {
  const Scalar iw =
      std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const Scalar ih =
      std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (iw <= 0 || ih <= 0) return 0;
  const Scalar inter = iw * ih;
  const Scalar uni = a.area() + b.area() - inter;
  if (uni <= 0) return 0;
  return inter / uni;
}

BoxDelta encode(const Box& prior, const Box& target) {
  if (prior.degenerate())
    throw std::invalid_argument("encode: degenerate prior box");
  if (target.degenerate())
    throw std::invalid_argument("encode: degenerate target box");
  BoxDelta d;
  d.dx = (target.cx() - prior.cx()) / prior.width();
  d.dy = (target.cy() - prior.cy()) / prior.height();
  d.dw = std::log(target.width() / prior.width());
  d.dh = std::log(target.height() / prior.height());
  return d;
}

Box decode(const Box& prior, const BoxDelta& delta) {
  if (prior.degenerate())
    throw std::invalid_argument("decode: degenerate prior box");
  const Scalar cx = prior.cx() + delta.dx * prior.width();
  const Scalar cy = prior.cy() + delta.dy * prior.height();
  const Scalar w = prior.width() * std::exp(delta.dw);
  const Scalar h = prior.height() * std::exp(delta.dh);
  return Box{cx - 0.5 * w, cy - 0.5 * h, cx + 0.5 * w, cy + 0.5 * h};
}

Box decode_clamped(const Box& prior, const BoxDelta& delta, const Box& bounds) {
  Box b = decode(prior, delta);
  b.x1 = std::clamp(b.x1, bounds.x1, bounds.x2);
  b.y1 = std::clamp(b.y1, bounds.y1, bounds.y2);
  b.x2 = std::clamp(b.x2, bounds.x1, bounds.x2);
  b.y2 = std::clamp(b.y2, bounds.y1, bounds.y2);
  return b;
}

}  // namespace mlc
