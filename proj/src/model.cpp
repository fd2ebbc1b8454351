#include "mlc/model.hpp"

#include <stdexcept>

namespace mlc {

HeadParams HeadParams::zeros(int classes, int dim) {
  HeadParams p;
  p.w_cls = MatrixX::Zero(classes, dim);
  p.b_cls = VectorX::Zero(classes);
  p.w_loc = MatrixX::Zero(4, dim);
  p.b_loc = Vector4::Zero();
  p.w_iur = RowVectorX::Zero(dim);
  p.b_iur = 0;
  return p;
}

HeadParams HeadParams::random_init(int classes, int dim, Rng& rng,
                                   Scalar scale) {
  HeadParams p = zeros(classes, dim);
  const int n = p.param_count();
  for (int i = 0; i < n; ++i) p.set_param(i, scale * rng.normal());
  return p;
}

int HeadParams::param_count() const {
  return static_cast<int>(w_cls.size() + b_cls.size() + w_loc.size() +
                          b_loc.size() + w_iur.size()) +
         1;
}

namespace {

// Row-major flat offset helpers over an Eigen matrix.
Scalar mat_get(const MatrixX& m, int i) {
  return m(i / m.cols(), i % m.cols());
}
void mat_set(MatrixX& m, int i, Scalar v) { m(i / m.cols(), i % m.cols()) = v; }

}  // namespace

Scalar HeadParams::get_param(int i) const {
  int k = i;
  if (k < w_cls.size()) return mat_get(w_cls, k);
  k -= static_cast<int>(w_cls.size());
  if (k < b_cls.size()) return b_cls[k];
  k -= static_cast<int>(b_cls.size());
  if (k < w_loc.size()) return mat_get(w_loc, k);
  k -= static_cast<int>(w_loc.size());
  if (k < b_loc.size()) return b_loc[k];
  k -= static_cast<int>(b_loc.size());
  if (k < w_iur.size()) return w_iur[k];
  k -= static_cast<int>(w_iur.size());
  if (k == 0) return b_iur;
  throw std::out_of_range("HeadParams::get_param: index out of range");
}

void HeadParams::set_param(int i, Scalar v) {
  int k = i;
  if (k < w_cls.size()) return mat_set(w_cls, k, v);
  k -= static_cast<int>(w_cls.size());
  if (k < b_cls.size()) {
    b_cls[k] = v;
    return;
  }
  k -= static_cast<int>(b_cls.size());
  if (k < w_loc.size()) return mat_set(w_loc, k, v);
  k -= static_cast<int>(w_loc.size());
  if (k < b_loc.size()) {
    b_loc[k] = v;
    return;
  }
  k -= static_cast<int>(b_loc.size());
  if (k < w_iur.size()) {
    w_iur[k] = v;
    return;
  }
  k -= static_cast<int>(w_iur.size());
  if (k == 0) {
    b_iur = v;
    return;
  }
  throw std::out_of_range("HeadParams::set_param: index out of range");
}

HeadOutput forward(const HeadParams& params, const VectorX& features,
                   const Box& prior) {
  if (features.size() != params.dim())
    throw std::invalid_argument("forward: feature dimension mismatch");

  HeadOutput out;
  out.cls_logits = params.w_cls * features + params.b_cls;
  out.class_scores = out.cls_logits.unaryExpr([](Scalar z) { return sigmoid(z); });
  const Vector4 d = params.w_loc * features + params.b_loc;
  out.delta = BoxDelta::from_vector(d);
  out.box = decode(prior, out.delta);
  out.iur_logit = params.w_iur.dot(features) + params.b_iur;
  out.iou_pred = sigmoid(out.iur_logit);
  return out;
}

HeadParams sgd_step(const HeadParams& params, const HeadGrads& grads,
                    Scalar lr) {
  if (lr <= 0) throw std::invalid_argument("sgd_step: lr must be > 0");
  HeadParams p = params;
  p.w_cls -= lr * grads.w_cls;
  p.b_cls -= lr * grads.b_cls;
  p.w_loc -= lr * grads.w_loc;
  p.b_loc -= lr * grads.b_loc;
  p.w_iur -= lr * grads.w_iur;
  p.b_iur -= lr * grads.b_iur;
  return p;
}

}  // namespace mlc
