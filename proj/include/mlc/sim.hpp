#pragma once

#include "mlc/assignment.hpp"
#include "mlc/eval.hpp"
#include "mlc/losses.hpp"
#include "mlc/model.hpp"
#include "mlc/postprocess.hpp"
#include "mlc/rng.hpp"
#include "mlc/types.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace mlc {

/// Synthetic scene generator configuration. divergence_bias moves each
/// object's most class-discriminative point away from the box center (as a
/// fraction of the box diagonal), which is what makes classification and
/// localization prefer different priors.
struct SceneConfig {
  int image_w = 64;
  int image_h = 64;
  int objects_min = 2;
  int objects_max = 4;
  int classes = 3;
  Scalar prior_stride = 8;
  Scalar prior_size = 14;
  int feature_dim = 16;
  Scalar divergence_bias = 0.4;
  Scalar noise_sigma = 0.1;
  std::uint64_t seed = 20260808;

  Scalar object_min_size = 9;
  Scalar object_max_size = 22;
  Scalar max_gt_overlap = 0.3;

  void validate() const;
};

struct Scene {
  int image_id = 0;
  int image_w = 0;
  int image_h = 0;
  std::vector<GroundTruth> gts;
  std::vector<Box> priors;
  std::vector<VectorX> features;
};

/// Deterministic scene from one RNG substream: sparse ground-truth boxes
/// (pairwise IoU capped), a square prior grid, and per-prior features whose
/// classification signal peaks at the divergence-biased point while the
/// localization signal peaks at the box center.
Scene generate_scene(const SceneConfig& cfg, int image_id, Rng rng);

/// Fixed train/val scene sets; scene i uses stream split(i) and validation
/// scenes use split(kValStreamBase + i) of the config seed.
struct Dataset {
  std::vector<Scene> train;
  std::vector<Scene> val;
};

inline constexpr std::uint64_t kValStreamBase = 1u << 20;
inline constexpr std::uint64_t kParamStream = 0x70617261;   // parameter init
inline constexpr std::uint64_t kNoiseStream = 0x6e6f6973;   // iou_pred noise

Dataset build_dataset(const SceneConfig& cfg, int n_train, int n_val);

struct TrainConfig {
  int epochs = 24;
  int scenes_per_epoch = 200;
  int val_scenes = 50;
  Scalar lr = 0.5;
  std::vector<int> lr_drop_epochs = {18, 22};
  Scalar lr_drop_factor = 0.1;
  int mlc_enable_epoch = 12;   // mutual labeling + IUR start after this epoch

  enum class BaselineMode { FixedThreshold, MutualLabeling };
  BaselineMode baseline_mode = BaselineMode::MutualLabeling;

  AssignmentConfig assignment;
  LossConfig losses;

  Scalar score_threshold = 0.05;  // detection emission cutoff
  NmsConfig nms;                  // validation-time NMS
  EvalConfig eval = EvalConfig::defaults();
  Scalar init_scale = 0.01;

  void validate() const;
};

struct EpochLog {
  int epoch = 0;
  Scalar lr = 0;
  bool mlc_active = false;
  Scalar mean_total = 0;
  Scalar mean_cls = 0;
  Scalar mean_loc = 0;
  Scalar mean_iur = 0;
  Scalar val_divergence = 0;
  bool val_divergence_degenerate = false;
  Scalar val_ap = 0;
};

struct TrainResult {
  HeadParams params;
  std::vector<EpochLog> log;
};

/// Run the candidate head over a scene's priors under the given parameters.
std::vector<Candidate> forward_scene(const Scene& scene,
                                     const HeadParams& params);

/// Pre-NMS per-class detections of one scene: every (candidate, class) pair
/// whose score reaches the threshold, boxes clamped to the image.
/// iou_preds supplies the per-candidate predicted IoU (possibly noised).
std::vector<Detection> pre_nms_detections(const Scene& scene,
                                          const std::vector<Candidate>& cands,
                                          std::span<const Scalar> iou_preds,
                                          Scalar score_threshold,
                                          int* next_det_id);

/// Two-phase training: fixed-threshold assignment until mlc_enable_epoch,
/// then the configured baseline_mode (mutual labeling re-labels groups and
/// the IoU-rescoring loss turns on). Logs one record per epoch. Throws
/// NumericalError when a loss goes non-finite.
TrainResult train(const SceneConfig& scfg, const TrainConfig& tcfg);
TrainResult train(const Dataset& data, const SceneConfig& scfg,
                  const TrainConfig& tcfg);

struct ValMetrics {
  Scalar ap = 0;
  std::vector<std::pair<Scalar, Scalar>> ap_per_threshold;
  std::map<int, Scalar> ar_at_k;
  SpearmanResult divergence;
};

/// Validation metrics for fixed parameters: per-class NMS in the given mode,
/// COCO-style AP, class-agnostic proposal AR, and the pooled divergence
/// metric. iou_noise_sigma > 0 perturbs every candidate's predicted IoU with
/// a deterministic Gaussian stream before post-processing.
ValMetrics validate_params(const std::vector<Scene>& val_scenes,
                           const HeadParams& params, const TrainConfig& tcfg,
                           NmsMode mode, Scalar iou_noise_sigma = 0,
                           std::uint64_t noise_seed = 0);

struct BenchmarkConfig {
  SceneConfig scene;
  TrainConfig train;
  std::vector<std::uint64_t> seeds = {101, 202, 303, 404, 505};
  Scalar iou_noise_sigma = 0.25;
  std::vector<Scalar> alpha_sweep;  // optional extra ML+IUR runs

  void validate() const;
};

struct BenchmarkCell {
  bool ml = false;
  bool iur = false;
  Scalar ap = 0;
  Scalar divergence = 0;
  std::map<int, Scalar> ar_at_k;
  std::vector<Scalar> ap_per_seed;
  std::vector<Scalar> divergence_per_seed;
  std::map<int, std::vector<Scalar>> ar_per_seed;
};

/// NMS-mode comparison on the IUR-only model (ML off): clean standard and
/// rescored ranking, plus rescored and iou-nms on noise-degraded IoU
/// predictions.
struct NmsComparison {
  Scalar ap_standard = 0;
  Scalar ap_rescored = 0;
  Scalar ap_rescored_noised = 0;
  Scalar ap_iou_nms_noised = 0;
  std::vector<Scalar> per_seed_standard;
  std::vector<Scalar> per_seed_rescored;
  std::vector<Scalar> per_seed_rescored_noised;
  std::vector<Scalar> per_seed_iou_nms_noised;
};

struct DirectionalCheck {
  std::string name;
  bool pass = false;
  Scalar value = 0;      // observed margin or difference
  Scalar threshold = 0;  // required bound on `value`
};

struct AlphaSweepEntry {
  Scalar alpha = 0;
  Scalar ap = 0;
  Scalar divergence = 0;
};

struct BenchmarkReport {
  std::vector<std::uint64_t> seeds;
  std::vector<BenchmarkCell> cells;  // (ml,iur) in order 00, 10, 01, 11
  NmsComparison nms;
  std::vector<DirectionalCheck> checks;
  std::vector<AlphaSweepEntry> alpha_sweep;

  const BenchmarkCell& cell(bool ml, bool iur) const;
};

/// Train the 2x2 {ML, IUR} grid per seed on shared scene sets, evaluate
/// every cell on the held-out validation scenes, run the NMS comparison,
/// and evaluate the directional checks.
BenchmarkReport run_benchmark(const BenchmarkConfig& cfg);

}  // namespace mlc
