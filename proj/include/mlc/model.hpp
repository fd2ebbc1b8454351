#pragma once

#include "mlc/geometry.hpp"
#include "mlc/rng.hpp"
#include "mlc/types.hpp"

#include <cmath>

namespace mlc {

/// Parameters of the per-candidate detector head: linear-sigmoid classifiers,
/// a linear box-delta regressor, and a linear-sigmoid IoU predictor that
/// reads the same features as the regressor.
struct HeadParams {
  MatrixX w_cls;      // C x D
  VectorX b_cls;      // C
  MatrixX w_loc;      // 4 x D
  Vector4 b_loc;      // 4
  RowVectorX w_iur;   // 1 x D
  Scalar b_iur = 0;

  int classes() const { return static_cast<int>(w_cls.rows()); }
  int dim() const { return static_cast<int>(w_cls.cols()); }

  static HeadParams zeros(int classes, int dim);
  static HeadParams random_init(int classes, int dim, Rng& rng,
                                Scalar scale = 0.01);

  /// Flat parameter view in a fixed order (w_cls row-major, b_cls, w_loc
  /// row-major, b_loc, w_iur, b_iur); used by SGD, checkpoints, and the
  /// finite-difference tests.
  int param_count() const;
  Scalar get_param(int i) const;
  void set_param(int i, Scalar v);
};

/// Gradients share the parameter layout.
using HeadGrads = HeadParams;

struct HeadOutput {
  VectorX class_scores;  // sigmoid, strictly in (0,1)
  VectorX cls_logits;
  BoxDelta delta;
  Box box;               // decode(prior, delta), unclamped
  Scalar iur_logit = 0;
  Scalar iou_pred = 0;   // sigmoid, strictly in (0,1)
};

HeadOutput forward(const HeadParams& params, const VectorX& features,
                   const Box& prior);

/// One plain gradient-descent step: params - lr * grads.
HeadParams sgd_step(const HeadParams& params, const HeadGrads& grads,
                    Scalar lr);

inline Scalar sigmoid(Scalar z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace mlc
