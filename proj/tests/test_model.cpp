#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mlc/assignment.hpp"
#include "mlc/losses.hpp"
#include "mlc/model.hpp"
#include "mlc/rng.hpp"

#include <cmath>

using namespace mlc;

TEST_CASE("zero parameters give neutral outputs") {
  const HeadParams p = HeadParams::zeros(3, 8);
  VectorX f = VectorX::Ones(8);
  const Box prior{2, 2, 10, 10};
  const HeadOutput out = forward(p, f, prior);
  for (int c = 0; c < 3; ++c) CHECK(out.class_scores[c] == 0.5);
  CHECK(out.iou_pred == 0.5);
  CHECK(out.box.x1 == prior.x1);
  CHECK(out.box.y2 == prior.y2);
}

TEST_CASE("forward is deterministic and strictly inside (0,1)") {
  Rng rng(3);
  HeadParams p = HeadParams::random_init(3, 8, rng, 0.5);
  VectorX f(8);
  for (int i = 0; i < 8; ++i) f[i] = rng.normal();
  const Box prior{0, 0, 8, 8};
  const HeadOutput a = forward(p, f, prior);
  const HeadOutput b = forward(p, f, prior);
  CHECK(a.class_scores == b.class_scores);
  CHECK(a.iou_pred == b.iou_pred);
  for (int c = 0; c < 3; ++c) {
    CHECK(a.class_scores[c] > 0);
    CHECK(a.class_scores[c] < 1);
  }
  CHECK(a.iou_pred > 0);
  CHECK(a.iou_pred < 1);
}

TEST_CASE("forward rejects a feature dimension mismatch") {
  const HeadParams p = HeadParams::zeros(2, 8);
  CHECK_THROWS_AS(forward(p, VectorX::Zero(5), Box{0, 0, 4, 4}),
                  std::invalid_argument);
}

TEST_CASE("flat parameter order round-trips") {
  Rng rng(9);
  HeadParams p = HeadParams::random_init(4, 6, rng, 1.0);
  const int n = p.param_count();
  CHECK(n == 4 * 6 + 4 + 4 * 6 + 4 + 6 + 1);
  HeadParams q = HeadParams::zeros(4, 6);
  for (int i = 0; i < n; ++i) q.set_param(i, p.get_param(i));
  CHECK(q.w_cls == p.w_cls);
  CHECK(q.b_cls == p.b_cls);
  CHECK(q.w_loc == p.w_loc);
  CHECK(q.b_loc == p.b_loc);
  CHECK(q.w_iur == p.w_iur);
  CHECK(q.b_iur == p.b_iur);
}

TEST_CASE("every forward output matches finite differences") {
  Rng rng(21);
  const int classes = 3, dim = 6;
  HeadParams params = HeadParams::random_init(classes, dim, rng, 0.4);
  VectorX f(dim);
  for (int i = 0; i < dim; ++i) f[i] = rng.normal();
  const Box prior{3, 5, 13, 17};

  // Outputs as scalar functions of the parameters.
  const auto outputs = [&](const HeadParams& p) {
    const HeadOutput o = forward(p, f, prior);
    std::vector<Scalar> v;
    for (int c = 0; c < classes; ++c) v.push_back(o.class_scores[c]);
    v.push_back(o.iou_pred);
    v.insert(v.end(), {o.box.x1, o.box.y1, o.box.x2, o.box.y2});
    return v;
  };

  // Analytic Jacobian from the head equations: sigmoids differentiate to
  // p(1-p) times the feature, the decode chain shifts centers by the prior
  // size and scales widths exponentially.
  const HeadOutput base = forward(params, f, prior);
  const int n_out = classes + 1 + 4;
  const int n_par = params.param_count();
  MatrixX jac = MatrixX::Zero(n_out, n_par);
  for (int c = 0; c < classes; ++c) {
    const Scalar s = base.class_scores[c];
    for (int d = 0; d < dim; ++d)
      jac(c, c * dim + d) = s * (1 - s) * f[d];
    jac(c, classes * dim + c) = s * (1 - s);
  }
  const int off_wloc = classes * dim + classes;
  const int off_bloc = off_wloc + 4 * dim;
  const int off_wiur = off_bloc + 4;
  const Scalar pi = base.iou_pred;
  for (int d = 0; d < dim; ++d) jac(classes, off_wiur + d) = pi * (1 - pi) * f[d];
  jac(classes, off_wiur + dim) = pi * (1 - pi);

  const Scalar pw = prior.width(), ph = prior.height();
  const Scalar bw = base.box.width(), bh = base.box.height();
  // d(corner)/d(delta component), deltas ordered (dx, dy, dw, dh).
  const Scalar corner_delta[4][4] = {
      {pw, 0, -0.5 * bw, 0},   // x1
      {0, ph, 0, -0.5 * bh},   // y1
      {pw, 0, 0.5 * bw, 0},    // x2
      {0, ph, 0, 0.5 * bh},    // y2
  };
  for (int corner = 0; corner < 4; ++corner)
    for (int i = 0; i < 4; ++i) {
      for (int d = 0; d < dim; ++d)
        jac(classes + 1 + corner, off_wloc + i * dim + d) =
            corner_delta[corner][i] * f[d];
      jac(classes + 1 + corner, off_bloc + i) = corner_delta[corner][i];
    }

  const Scalar h = 1e-6;
  for (int p_i = 0; p_i < n_par; ++p_i) {
    HeadParams plus = params, minus = params;
    plus.set_param(p_i, params.get_param(p_i) + h);
    minus.set_param(p_i, params.get_param(p_i) - h);
    const auto vp = outputs(plus);
    const auto vm = outputs(minus);
    for (int o = 0; o < n_out; ++o) {
      const Scalar fd = (vp[o] - vm[o]) / (2 * h);
      const Scalar an = jac(o, p_i);
      const Scalar rel =
          std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1e-4});
      CHECK(rel < 1e-4);
    }
  }
}

TEST_CASE("sgd_step is an elementwise descent step") {
  Rng rng(33);
  HeadParams p = HeadParams::random_init(2, 4, rng, 1.0);

  const HeadGrads zero = HeadParams::zeros(2, 4);
  const HeadParams same = sgd_step(p, zero, 0.5);
  for (int i = 0; i < p.param_count(); ++i)
    CHECK(same.get_param(i) == p.get_param(i));

  const HeadParams gone = sgd_step(p, p, 1.0);
  for (int i = 0; i < p.param_count(); ++i)
    CHECK(gone.get_param(i) == doctest::Approx(0.0));

  CHECK_THROWS_AS(sgd_step(p, zero, 0.0), std::invalid_argument);
}

TEST_CASE("loss decreases over 100 steps on a fixed instance") {
  Rng rng(55);
  const int classes = 2, dim = 6;
  HeadParams params = HeadParams::random_init(classes, dim, rng, 0.1);

  std::vector<GroundTruth> gts{{0, Box{2, 2, 12, 12}, 1}};
  std::vector<Candidate> cands(2);
  std::vector<VectorX> feats;
  cands[0].id = 0;
  cands[0].prior = Box{2, 2, 12, 12};
  cands[1].id = 1;
  cands[1].prior = Box{4, 2, 14, 12};
  for (int j = 0; j < 2; ++j) {
    VectorX f(dim);
    for (int i = 0; i < dim; ++i) f[i] = rng.normal();
    feats.push_back(f);
  }

  AssignmentConfig acfg;
  LossConfig lcfg;
  const auto step_loss = [&](bool update) {
    for (std::size_t j = 0; j < cands.size(); ++j) {
      const HeadOutput out = forward(params, feats[j], cands[j].prior);
      cands[j].class_scores = out.class_scores;
      cands[j].box = out.box;
      cands[j].iou_pred = out.iou_pred;
    }
    Grouping g = match_candidates(cands, gts, acfg);
    AssignmentResult r = mutual_label(g, cands, gts, acfg);
    ignored_weights(r, g, cands, acfg);
    const LossBreakdown bd = mlc_total(cands, feats, gts, r, params, lcfg);
    if (update) params = sgd_step(params, bd.grads, 0.1);
    return bd.total;
  };

  const Scalar initial = step_loss(false);
  for (int i = 0; i < 100; ++i) step_loss(true);
  const Scalar final_loss = step_loss(false);
  CHECK(final_loss < initial);
}
