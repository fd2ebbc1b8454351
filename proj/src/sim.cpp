#include "mlc/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mlc {

void SceneConfig::validate() const {
  if (image_w <= 0 || image_h <= 0)
    throw ConfigError("scene.image_size entries must be positive");
  if (objects_min < 1 || objects_max < objects_min)
    throw ConfigError("scene.objects_per_scene must satisfy 1 <= min <= max");
  if (classes < 1) throw ConfigError("scene.classes must be >= 1");
  if (prior_stride <= 0) throw ConfigError("scene.prior_stride must be positive");
  if (prior_size <= 0) throw ConfigError("scene.prior_size must be positive");
  if (feature_dim < 6 + 2 * classes)
    throw ConfigError("scene.feature_dim must be >= 2 * classes + 6");
  if (divergence_bias < 0 || divergence_bias > 1)
    throw ConfigError("scene.divergence_bias must lie in [0, 1]");
  if (noise_sigma < 0) throw ConfigError("scene.noise_sigma must be >= 0");
  if (!(object_min_size > 0 && object_min_size <= object_max_size))
    throw ConfigError("scene.object_size range must satisfy 0 < min <= max");
  if (object_max_size > std::min(image_w, image_h) - 2)
    throw ConfigError(
        "scene.object_max_size must leave the 1px placement margin");
  if (max_gt_overlap < 0 || max_gt_overlap > 1)
    throw ConfigError("scene.max_gt_overlap must lie in [0, 1]");
}

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("train.epochs must be >= 1");
  if (scenes_per_epoch < 1)
    throw ConfigError("train.scenes_per_epoch must be >= 1");
  if (val_scenes < 1) throw ConfigError("train.val_scenes must be >= 1");
  if (lr <= 0) throw ConfigError("train.lr must be > 0");
  if (!(lr_drop_factor > 0 && lr_drop_factor <= 1))
    throw ConfigError("train.lr_drop_factor must lie in (0, 1]");
  if (mlc_enable_epoch < 0 || mlc_enable_epoch > epochs)
    throw ConfigError("train.mlc_enable_epoch must lie in [0, epochs]");
  if (score_threshold < 0 || score_threshold >= 1)
    throw ConfigError("train.score_threshold must lie in [0, 1)");
  if (init_scale < 0) throw ConfigError("train.init_scale must be >= 0");
  assignment.validate();
  losses.validate();
  nms.validate();
  eval.validate();
}

namespace {

Scalar sq(Scalar v) { return v * v; }

Box clamp_box(const Box& b, const Box& bounds) {
  return Box{std::clamp(b.x1, bounds.x1, bounds.x2),
             std::clamp(b.y1, bounds.y1, bounds.y2),
             std::clamp(b.x2, bounds.x1, bounds.x2),
             std::clamp(b.y2, bounds.y1, bounds.y2)};
}

}  // namespace

Scene generate_scene(const SceneConfig& cfg, int image_id, Rng rng) {
  cfg.validate();
  Scene scene;
  scene.image_id = image_id;
  scene.image_w = cfg.image_w;
  scene.image_h = cfg.image_h;

  // Ground-truth boxes: rejection-sample until pairwise IoU stays below the
  // overlap cap.
  const int n_objects =
      static_cast<int>(rng.uniform_int(cfg.objects_min, cfg.objects_max));
  struct ObjectAux {
    Scalar qx, qy;  // class-discriminative point
  };
  std::vector<ObjectAux> aux;

  for (int k = 0; k < n_objects; ++k) {
    bool placed = false;
    for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
      const Scalar w = rng.uniform(cfg.object_min_size, cfg.object_max_size);
      const Scalar h = rng.uniform(cfg.object_min_size, cfg.object_max_size);
      const Scalar margin = 1;
      const Scalar cx =
          rng.uniform(0.5 * w + margin, cfg.image_w - 0.5 * w - margin);
      const Scalar cy =
          rng.uniform(0.5 * h + margin, cfg.image_h - 0.5 * h - margin);
      const Box box{cx - 0.5 * w, cy - 0.5 * h, cx + 0.5 * w, cy + 0.5 * h};

      bool ok = true;
      for (const auto& gt : scene.gts)
        if (iou(box, gt.box) > cfg.max_gt_overlap) {
          ok = false;
          break;
        }
      if (!ok) continue;

      GroundTruth gt;
      gt.id = k;
      gt.box = box;
      gt.label = static_cast<int>(rng.uniform_int(0, cfg.classes - 1));
      scene.gts.push_back(gt);
      placed = true;
    }
    if (!placed)
      throw ConfigError(
          "generate_scene: no valid object placement found in 1000 attempts; "
          "relax scene.objects_per_scene or scene.max_gt_overlap");
  }

  // Per-object discriminative point: offset from the center by
  // divergence_bias * diagonal in a random direction, kept inside the box.
  for (const auto& gt : scene.gts) {
    const Scalar angle = rng.uniform(0, 6.283185307179586);
    const Scalar diag = std::hypot(gt.box.width(), gt.box.height());
    const Scalar r = cfg.divergence_bias * diag;
    ObjectAux a;
    a.qx = std::clamp(gt.box.cx() + r * std::cos(angle), gt.box.x1, gt.box.x2);
    a.qy = std::clamp(gt.box.cy() + r * std::sin(angle), gt.box.y1, gt.box.y2);
    aux.push_back(a);
  }

  // Square prior grid.
  const int nx = static_cast<int>(cfg.image_w / cfg.prior_stride);
  const int ny = static_cast<int>(cfg.image_h / cfg.prior_stride);
  for (int gy = 0; gy < ny; ++gy)
    for (int gx = 0; gx < nx; ++gx) {
      const Scalar cx = (static_cast<Scalar>(gx) + 0.5) * cfg.prior_stride;
      const Scalar cy = (static_cast<Scalar>(gy) + 0.5) * cfg.prior_stride;
      scene.priors.push_back(Box{cx - 0.5 * cfg.prior_size,
                                 cy - 0.5 * cfg.prior_size,
                                 cx + 0.5 * cfg.prior_size,
                                 cy + 0.5 * cfg.prior_size});
    }

  // Features. The localization channels carry the encode-space target
  // attenuated by a center-proximity kernel; class evidence appears twice,
  // at full strength around the discriminative point and at reduced
  // strength around the center, so confidence learned from geometric labels
  // prefers the biased point while a quality-driven labeling can still
  // shift it back. With divergence_bias = 0 the two kernels coincide.
  constexpr Scalar kCenterClassGain = 0.5;
  scene.features.reserve(scene.priors.size());
  for (const auto& prior : scene.priors) {
    VectorX f = VectorX::Zero(cfg.feature_dim);
    if (!scene.gts.empty()) {
      // Nearest object by center distance, ties to the lower id.
      int nearest = 0;
      Scalar best = std::numeric_limits<Scalar>::infinity();
      for (std::size_t k = 0; k < scene.gts.size(); ++k) {
        const Scalar d2 = sq(prior.cx() - scene.gts[k].box.cx()) +
                          sq(prior.cy() - scene.gts[k].box.cy());
        if (d2 < best) {
          best = d2;
          nearest = static_cast<int>(k);
        }
      }
      const GroundTruth& gt = scene.gts[nearest];
      const ObjectAux& a = aux[nearest];
      const Scalar diag = std::hypot(gt.box.width(), gt.box.height());
      const Scalar loc_kernel = 2 * sq(0.25 * diag);
      const Scalar cls_kernel = 2 * sq(0.3 * diag);
      const Scalar phi_loc =
          std::exp(-(sq(prior.cx() - gt.box.cx()) + sq(prior.cy() - gt.box.cy())) /
                   loc_kernel);
      const Scalar phi_cls =
          std::exp(-(sq(prior.cx() - a.qx) + sq(prior.cy() - a.qy)) / cls_kernel);
      const Scalar phi_center =
          std::exp(-(sq(prior.cx() - gt.box.cx()) + sq(prior.cy() - gt.box.cy())) /
                   cls_kernel);

      const Vector4 target = encode(prior, gt.box).as_vector();
      for (int i = 0; i < 4; ++i) f[i] = phi_loc * target[i];
      f[4] = phi_loc;
      f[5] = phi_cls;
      f[6 + gt.label] = phi_cls;
      f[6 + cfg.classes + gt.label] = kCenterClassGain * phi_center;
    }
    for (int i = 0; i < cfg.feature_dim; ++i)
      f[i] += cfg.noise_sigma * rng.normal();
    scene.features.push_back(std::move(f));
  }
  return scene;
}

Dataset build_dataset(const SceneConfig& cfg, int n_train, int n_val) {
  const Rng root(cfg.seed);
  Dataset data;
  data.train.reserve(n_train);
  for (int i = 0; i < n_train; ++i)
    data.train.push_back(generate_scene(cfg, i, root.split(i)));
  data.val.reserve(n_val);
  for (int i = 0; i < n_val; ++i)
    data.val.push_back(generate_scene(cfg, static_cast<int>(kValStreamBase) + i,
                                      root.split(kValStreamBase + i)));
  return data;
}

std::vector<Candidate> forward_scene(const Scene& scene,
                                     const HeadParams& params) {
  std::vector<Candidate> cands(scene.priors.size());
  for (std::size_t j = 0; j < scene.priors.size(); ++j) {
    const HeadOutput out = forward(params, scene.features[j], scene.priors[j]);
    Candidate& c = cands[j];
    c.id = static_cast<int>(j);
    c.prior = scene.priors[j];
    c.class_scores = out.class_scores;
    c.box = out.box;
    c.iou_pred = out.iou_pred;
  }
  return cands;
}

std::vector<Detection> pre_nms_detections(const Scene& scene,
                                          const std::vector<Candidate>& cands,
                                          std::span<const Scalar> iou_preds,
                                          Scalar score_threshold,
                                          int* next_det_id) {
  const Box bounds{0, 0, static_cast<Scalar>(scene.image_w),
                   static_cast<Scalar>(scene.image_h)};
  std::vector<Detection> dets;
  for (std::size_t j = 0; j < cands.size(); ++j) {
    const Candidate& c = cands[j];
    for (int cls = 0; cls < c.class_scores.size(); ++cls) {
      const Scalar s = c.class_scores[cls];
      if (s < score_threshold) continue;
      Detection d;
      d.id = (*next_det_id)++;
      d.image_id = scene.image_id;
      d.cls = cls;
      d.box = clamp_box(c.box, bounds);
      d.raw_conf = s;
      d.score = s;
      d.iou_pred = iou_preds[j];
      dets.push_back(std::move(d));
    }
  }
  return dets;
}

namespace {

AssignmentResult assign_phase(std::vector<Candidate>& cands, const Scene& scene,
                              const TrainConfig& tcfg, bool mlc_active) {
  const Grouping grouping = match_candidates(cands, scene.gts, tcfg.assignment);
  if (mlc_active &&
      tcfg.baseline_mode == TrainConfig::BaselineMode::MutualLabeling) {
    AssignmentResult assignment =
        mutual_label(grouping, cands, scene.gts, tcfg.assignment);
    ignored_weights(assignment, grouping, cands, tcfg.assignment);
    return assignment;
  }
  return baseline_label(grouping, cands, scene.gts);
}

// Full objective with a classification-only fallback for scenes where the
// fixed-threshold baseline finds no positive at all.
LossBreakdown scene_loss(const std::vector<Candidate>& cands,
                         const Scene& scene,
                         const AssignmentResult& assignment,
                         const HeadParams& params, const LossConfig& lcfg) {
  if (!assignment.pos_loc.empty())
    return mlc_total(cands, scene.features, scene.gts, assignment, params, lcfg);

  std::vector<int> cls_set;
  cls_set.insert(cls_set.end(), assignment.pos_cls.begin(), assignment.pos_cls.end());
  cls_set.insert(cls_set.end(), assignment.neg_cls.begin(), assignment.neg_cls.end());
  cls_set.insert(cls_set.end(), assignment.background.begin(), assignment.background.end());
  std::sort(cls_set.begin(), cls_set.end());

  LossBreakdown bd;
  bd.grads = HeadParams::zeros(params.classes(), params.dim());
  bd.l_cls = cls_loss(cands, scene.features, scene.gts, cls_set,
                      assignment.pos_cls, assignment.w_cls, params, &bd.grads);
  bd.total = bd.l_cls;
  return bd;
}

std::vector<Scalar> noised_iou_preds(const std::vector<Candidate>& cands,
                                     int image_id, Scalar sigma,
                                     std::uint64_t noise_seed) {
  std::vector<Scalar> preds(cands.size());
  Rng rng = Rng(noise_seed).split(kNoiseStream).split(
      static_cast<std::uint64_t>(image_id));
  for (std::size_t j = 0; j < cands.size(); ++j) {
    Scalar p = cands[j].iou_pred;
    if (sigma > 0) p = std::clamp(p + sigma * rng.normal(), Scalar(0), Scalar(1));
    preds[j] = p;
  }
  return preds;
}

}  // namespace

TrainResult train(const SceneConfig& scfg, const TrainConfig& tcfg) {
  const Dataset data = build_dataset(scfg, tcfg.scenes_per_epoch, tcfg.val_scenes);
  return train(data, scfg, tcfg);
}

TrainResult train(const Dataset& data, const SceneConfig& scfg,
                  const TrainConfig& tcfg) {
  scfg.validate();
  tcfg.validate();

  Rng init_rng = Rng(scfg.seed).split(kParamStream);
  HeadParams params =
      HeadParams::random_init(scfg.classes, scfg.feature_dim, init_rng,
                              tcfg.init_scale);

  TrainResult result;
  for (int epoch = 1; epoch <= tcfg.epochs; ++epoch) {
    Scalar lr = tcfg.lr;
    for (int drop : tcfg.lr_drop_epochs)
      if (epoch >= drop) lr *= tcfg.lr_drop_factor;
    const bool mlc_active = epoch > tcfg.mlc_enable_epoch;

    LossConfig lcfg = tcfg.losses;
    if (!mlc_active) lcfg.gamma = 0;

    Scalar sum_total = 0, sum_cls = 0, sum_loc = 0, sum_iur = 0;
    for (std::size_t s = 0; s < data.train.size(); ++s) {
      const Scene& scene = data.train[s];
      std::vector<Candidate> cands = forward_scene(scene, params);
      const AssignmentResult assignment =
          assign_phase(cands, scene, tcfg, mlc_active);
      const LossBreakdown bd =
          scene_loss(cands, scene, assignment, params, lcfg);
      if (!std::isfinite(bd.total))
        throw NumericalError("train: non-finite loss at epoch " +
                             std::to_string(epoch) + ", scene " +
                             std::to_string(scene.image_id));
      params = sgd_step(params, bd.grads, lr);
      sum_total += bd.total;
      sum_cls += bd.l_cls;
      sum_loc += bd.l_loc;
      sum_iur += bd.l_iur;
    }

    const ValMetrics vm =
        validate_params(data.val, params, tcfg, tcfg.nms.mode);

    EpochLog log;
    log.epoch = epoch;
    log.lr = lr;
    log.mlc_active = mlc_active;
    const auto n = static_cast<Scalar>(data.train.size());
    log.mean_total = sum_total / n;
    log.mean_cls = sum_cls / n;
    log.mean_loc = sum_loc / n;
    log.mean_iur = sum_iur / n;
    log.val_divergence = vm.divergence.value;
    log.val_divergence_degenerate = vm.divergence.degenerate;
    log.val_ap = vm.ap;
    result.log.push_back(log);
  }
  result.params = std::move(params);
  return result;
}

ValMetrics validate_params(const std::vector<Scene>& val_scenes,
                           const HeadParams& params, const TrainConfig& tcfg,
                           NmsMode mode, Scalar iou_noise_sigma,
                           std::uint64_t noise_seed) {
  std::vector<DivergencePair> pairs;
  std::vector<Detection> all_dets;
  std::vector<Detection> all_proposals;
  std::vector<GtRecord> all_gts;
  int next_det_id = 0;
  int next_prop_id = 0;

  NmsConfig det_nms = tcfg.nms;
  det_nms.mode = mode;

  for (const Scene& scene : val_scenes) {
    std::vector<Candidate> cands = forward_scene(scene, params);
    const Box bounds{0, 0, static_cast<Scalar>(scene.image_w),
                     static_cast<Scalar>(scene.image_h)};

    for (const auto& gt : scene.gts)
      all_gts.push_back(GtRecord{scene.image_id, gt.id, gt.label, gt.box});

    // Divergence population: group members matched by the configured
    // matcher, confidence on the object's class, IoU of the current box.
    const Grouping grouping =
        match_candidates(cands, scene.gts, tcfg.assignment);
    std::map<int, const GroundTruth*> by_id;
    for (const auto& gt : scene.gts) by_id[gt.id] = &gt;
    for (const auto& [gt_id, members] : grouping.members) {
      const GroundTruth& gt = *by_id.at(gt_id);
      for (int j : members)
        pairs.push_back(DivergencePair{scene.image_id, gt_id,
                                       cands[j].class_scores[gt.label],
                                       iou(cands[j].box, gt.box)});
    }

    const std::vector<Scalar> preds =
        noised_iou_preds(cands, scene.image_id, iou_noise_sigma, noise_seed);

    // Per-class detections above the emission threshold.
    std::map<int, std::vector<Detection>> per_class;
    for (Detection& d : pre_nms_detections(scene, cands, preds,
                                           tcfg.score_threshold, &next_det_id))
      per_class[d.cls].push_back(std::move(d));
    for (auto& [cls, dets] : per_class) {
      std::vector<Detection> kept = nms(dets, det_nms);
      all_dets.insert(all_dets.end(), kept.begin(), kept.end());
    }

    // Class-agnostic proposals from every candidate.
    std::vector<Detection> props;
    for (std::size_t j = 0; j < cands.size(); ++j) {
      const Candidate& c = cands[j];
      Detection d;
      d.id = next_prop_id++;
      d.image_id = scene.image_id;
      d.cls = 0;
      d.box = clamp_box(c.box, bounds);
      d.raw_conf = c.class_scores.maxCoeff();
      d.score = d.raw_conf;
      d.iou_pred = preds[j];
      props.push_back(std::move(d));
    }
    std::vector<Detection> kept_props = nms(props, det_nms);
    all_proposals.insert(all_proposals.end(), kept_props.begin(),
                         kept_props.end());
  }

  ValMetrics vm;
  const EvalReport ap_report =
      evaluate_detections(all_dets, all_gts, tcfg.eval);
  vm.ap = ap_report.ap;
  vm.ap_per_threshold = ap_report.ap_per_threshold;
  for (int k : tcfg.eval.ar_limits)
    vm.ar_at_k[k] = average_recall(all_proposals, all_gts, k, tcfg.eval);
  vm.divergence = pooled_divergence(pairs);
  return vm;
}

void BenchmarkConfig::validate() const {
  scene.validate();
  train.validate();
  if (seeds.empty()) throw ConfigError("benchmark.seeds must be non-empty");
  if (iou_noise_sigma < 0)
    throw ConfigError("benchmark.iou_noise_sigma must be >= 0");
  for (Scalar a : alpha_sweep)
    if (a < 0) throw ConfigError("benchmark.alpha_sweep entries must be >= 0");
}

const BenchmarkCell& BenchmarkReport::cell(bool ml, bool iur) const {
  for (const auto& c : cells)
    if (c.ml == ml && c.iur == iur) return c;
  throw std::logic_error("BenchmarkReport::cell: missing cell");
}

namespace {

Scalar mean(const std::vector<Scalar>& v) {
  Scalar s = 0;
  for (Scalar x : v) s += x;
  return v.empty() ? 0 : s / static_cast<Scalar>(v.size());
}

}  // namespace

BenchmarkReport run_benchmark(const BenchmarkConfig& cfg) {
  cfg.validate();

  BenchmarkReport report;
  report.seeds = cfg.seeds;
  const std::pair<bool, bool> grid[4] = {
      {false, false}, {true, false}, {false, true}, {true, true}};
  for (auto [ml, iur] : grid) {
    BenchmarkCell cell;
    cell.ml = ml;
    cell.iur = iur;
    report.cells.push_back(cell);
  }

  std::map<Scalar, std::vector<Scalar>> alpha_ap, alpha_div;

  for (std::uint64_t seed : cfg.seeds) {
    SceneConfig scfg = cfg.scene;
    scfg.seed = seed;
    const Dataset data =
        build_dataset(scfg, cfg.train.scenes_per_epoch, cfg.train.val_scenes);

    for (auto& cell : report.cells) {
      TrainConfig tcfg = cfg.train;
      tcfg.baseline_mode = cell.ml ? TrainConfig::BaselineMode::MutualLabeling
                                   : TrainConfig::BaselineMode::FixedThreshold;
      if (!cell.iur) tcfg.losses.gamma = 0;
      tcfg.nms.mode = cell.iur ? NmsMode::Rescored : NmsMode::Standard;

      const TrainResult tr = train(data, scfg, tcfg);
      const ValMetrics vm =
          validate_params(data.val, tr.params, tcfg, tcfg.nms.mode);
      cell.ap_per_seed.push_back(vm.ap);
      cell.divergence_per_seed.push_back(vm.divergence.value);
      for (const auto& [k, ar] : vm.ar_at_k) cell.ar_per_seed[k].push_back(ar);

      // NMS-mode comparison on the IUR-only model.
      if (!cell.ml && cell.iur) {
        const ValMetrics std_vm =
            validate_params(data.val, tr.params, tcfg, NmsMode::Standard);
        const ValMetrics resc_noised =
            validate_params(data.val, tr.params, tcfg, NmsMode::Rescored,
                            cfg.iou_noise_sigma, seed);
        const ValMetrics iounms_noised =
            validate_params(data.val, tr.params, tcfg, NmsMode::IouNms,
                            cfg.iou_noise_sigma, seed);
        report.nms.per_seed_standard.push_back(std_vm.ap);
        report.nms.per_seed_rescored.push_back(vm.ap);
        report.nms.per_seed_rescored_noised.push_back(resc_noised.ap);
        report.nms.per_seed_iou_nms_noised.push_back(iounms_noised.ap);
      }
    }

    for (Scalar alpha : cfg.alpha_sweep) {
      TrainConfig tcfg = cfg.train;
      tcfg.baseline_mode = TrainConfig::BaselineMode::MutualLabeling;
      tcfg.assignment.alpha = alpha;
      tcfg.nms.mode = NmsMode::Rescored;
      const TrainResult tr = train(data, scfg, tcfg);
      const ValMetrics vm =
          validate_params(data.val, tr.params, tcfg, tcfg.nms.mode);
      alpha_ap[alpha].push_back(vm.ap);
      alpha_div[alpha].push_back(vm.divergence.value);
    }
  }

  for (auto& cell : report.cells) {
    cell.ap = mean(cell.ap_per_seed);
    cell.divergence = mean(cell.divergence_per_seed);
    for (const auto& [k, v] : cell.ar_per_seed) cell.ar_at_k[k] = mean(v);
  }
  report.nms.ap_standard = mean(report.nms.per_seed_standard);
  report.nms.ap_rescored = mean(report.nms.per_seed_rescored);
  report.nms.ap_rescored_noised = mean(report.nms.per_seed_rescored_noised);
  report.nms.ap_iou_nms_noised = mean(report.nms.per_seed_iou_nms_noised);

  for (const auto& [alpha, aps] : alpha_ap)
    report.alpha_sweep.push_back(
        AlphaSweepEntry{alpha, mean(aps), mean(alpha_div[alpha])});

  // Directional checks mirroring the ablation tables.
  const auto& base = report.cell(false, false);
  const auto& ml_only = report.cell(true, false);
  const auto& iur_only = report.cell(false, true);
  const auto& both = report.cell(true, true);

  report.checks.push_back(DirectionalCheck{
      "ml_raises_divergence", ml_only.divergence - base.divergence >= 0.05,
      ml_only.divergence - base.divergence, 0.05});
  report.checks.push_back(DirectionalCheck{
      "ml_raises_ap", ml_only.ap - base.ap > 0, ml_only.ap - base.ap, 0});
  report.checks.push_back(DirectionalCheck{
      "rescored_beats_standard",
      report.nms.ap_rescored - report.nms.ap_standard > 0,
      report.nms.ap_rescored - report.nms.ap_standard, 0});
  report.checks.push_back(DirectionalCheck{
      "noisy_iou_nms_below_rescored",
      report.nms.ap_rescored_noised - report.nms.ap_iou_nms_noised > 0,
      report.nms.ap_rescored_noised - report.nms.ap_iou_nms_noised, 0});
  const Scalar best_other = std::max({base.ap, ml_only.ap, iur_only.ap});
  report.checks.push_back(DirectionalCheck{
      "ml_iur_best_of_grid", both.ap - best_other > 0, both.ap - best_other,
      0});
  for (const auto& [k, ar] : ml_only.ar_at_k) {
    const Scalar gain = ar - base.ar_at_k.at(k);
    report.checks.push_back(DirectionalCheck{
        "ml_raises_ar_at_" + std::to_string(k), gain > 0, gain, 0});
  }
  return report;
}

}  // namespace mlc
