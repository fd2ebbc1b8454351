#pragma once

#include "mlc/types.hpp"

namespace mlc {

/// Axis-aligned box in continuous image coordinates, x1 <= x2, y1 <= y2.
/// Area is (x2-x1)*(y2-y1) with no pixel "+1" correction.
struct Box {
  Scalar x1 = 0, y1 = 0, x2 = 0, y2 = 0;

  Scalar width() const { return x2 - x1; }
  Scalar height() const { return y2 - y1; }
  Scalar area() const { return width() * height(); }
  Scalar cx() const { return 0.5 * (x1 + x2); }
  Scalar cy() const { return 0.5 * (y1 + y2); }

  bool degenerate() const { return width() <= 0 || height() <= 0; }

  bool contains(Scalar px, Scalar py) const {
    return px >= x1 && px <= x2 && py >= y1 && py <= y2;
  }
};

/// Box regression offsets: normalized center shift plus log size ratios.
struct BoxDelta {
  Scalar dx = 0, dy = 0, dw = 0, dh = 0;

  Vector4 as_vector() const { return Vector4(dx, dy, dw, dh); }
  static BoxDelta from_vector(const Vector4& v) {
    return BoxDelta{v[0], v[1], v[2], v[3]};
  }
};

/// Intersection-over-union of two boxes; 0 when the union has zero area.
Scalar iou(const Box& a, const Box& b);

/// Delta that maps `prior` onto `target`. Throws std::invalid_argument for a
/// degenerate prior or target.
BoxDelta encode(const Box& prior, const Box& target);

/// Inverse of encode. Throws std::invalid_argument for a degenerate prior.
Box decode(const Box& prior, const BoxDelta& delta);

/// decode() with the result clamped into `bounds`.
Box decode_clamped(const Box& prior, const BoxDelta& delta, const Box& bounds);

}  // namespace mlc
