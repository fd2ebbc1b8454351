#include "mlc/io.hpp"
#include "mlc/sim.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace mlc;

namespace {

constexpr const char* kDumpPopulation =
    "dump detections matched to the best same-class ground truth with "
    "IoU > 0; confidence = raw_conf; pooled over all records";

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed_flag;
};

BenchmarkConfig load_config(const CommonOpts& opts) {
  BenchmarkConfig base = io::default_config();
  if (const char* env = std::getenv("MLC_SEED"))
    base.scene.seed = std::strtoull(env, nullptr, 10);

  BenchmarkConfig cfg = opts.config_path.empty()
                            ? base
                            : io::parse_config_file(opts.config_path, base);
  if (opts.seed_flag) cfg.scene.seed = *opts.seed_flag;
  cfg.scene.validate();
  cfg.train.validate();
  return cfg;
}

fs::path ensure_out_dir(const std::string& out_dir) {
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  return dir;
}

// Confidence/IoU pairs from dump records: each detection against its
// best-IoU ground truth of the same image and class, kept when IoU > 0.
std::vector<DivergencePair> dump_pairs(
    const std::vector<io::DetectionDumpRecord>& dets,
    const std::vector<io::GroundTruthDumpRecord>& gts) {
  std::vector<DivergencePair> pairs;
  for (const auto& d : dets) {
    Scalar best = 0;
    int best_object = -1;
    for (const auto& g : gts) {
      if (g.image_id != d.image_id || g.cls != d.cls) continue;
      const Scalar v = iou(d.box, g.box);
      if (v > best) {
        best = v;
        best_object = g.object_id;
      }
    }
    if (best_object >= 0)
      pairs.push_back(
          DivergencePair{d.image_id, best_object, d.raw_conf, best});
  }
  return pairs;
}

int cmd_simulate(const CommonOpts& opts) {
  const BenchmarkConfig cfg = load_config(opts);
  const fs::path dir = ensure_out_dir(opts.out_dir);

  const Dataset data = build_dataset(cfg.scene, cfg.train.scenes_per_epoch,
                                     cfg.train.val_scenes);
  io::write_scenes((dir / "train_scenes.jsonl").string(), data.train);
  io::write_scenes((dir / "val_scenes.jsonl").string(), data.val);
  io::write_gt_dump((dir / "train_gts.jsonl").string(),
                    io::scene_gt_records(data.train));
  io::write_gt_dump((dir / "val_gts.jsonl").string(),
                    io::scene_gt_records(data.val));

  std::cout << "{\"schema\": 1, \"train_scenes\": " << data.train.size()
            << ", \"val_scenes\": " << data.val.size() << ", \"seed\": "
            << cfg.scene.seed << "}\n";
  return 0;
}

int cmd_train(const CommonOpts& opts) {
  const BenchmarkConfig cfg = load_config(opts);
  const fs::path dir = ensure_out_dir(opts.out_dir);

  const Dataset data = build_dataset(cfg.scene, cfg.train.scenes_per_epoch,
                                     cfg.train.val_scenes);
  std::cerr << "training " << cfg.train.epochs << " epochs on "
            << data.train.size() << " scenes\n";
  const TrainResult tr = train(data, cfg.scene, cfg.train);
  const ValMetrics vm =
      validate_params(data.val, tr.params, cfg.train, cfg.train.nms.mode);

  io::save_checkpoint((dir / "checkpoint.json").string(), tr.params);
  {
    std::ofstream log((dir / "train_log.jsonl").string(), std::ios::binary);
    log << io::train_log_jsonl(tr.log);
  }
  const std::string report = io::train_report_json(vm, cfg.train.epochs);
  {
    std::ofstream out((dir / "report.json").string(), std::ios::binary);
    out << report;
  }

  // Pre-NMS validation detections + ground truth, ready for `eval`.
  std::vector<io::DetectionDumpRecord> det_records;
  int next_id = 0;
  for (const Scene& scene : data.val) {
    const std::vector<Candidate> cands = forward_scene(scene, tr.params);
    std::vector<Scalar> preds(cands.size());
    for (std::size_t j = 0; j < cands.size(); ++j) preds[j] = cands[j].iou_pred;
    for (const Detection& d : pre_nms_detections(
             scene, cands, preds, cfg.train.score_threshold, &next_id))
      det_records.push_back(io::DetectionDumpRecord{
          d.image_id, d.cls, d.box, d.raw_conf, d.iou_pred});
  }
  io::write_detection_dump((dir / "val_dets.jsonl").string(), det_records);
  io::write_gt_dump((dir / "val_gts.jsonl").string(),
                    io::scene_gt_records(data.val));

  std::cout << report;
  return 0;
}

int cmd_eval(const std::string& dets_path, const std::string& gts_path,
             const std::string& nms_mode, Scalar iou_threshold, int max_out,
             const std::vector<int>& ar_limits) {
  const auto det_records = io::read_detection_dump(dets_path);
  const auto gt_records = io::read_gt_dump(gts_path);

  NmsConfig nms_cfg;
  nms_cfg.iou_threshold = iou_threshold;
  nms_cfg.max_out = max_out;
  nms_cfg.mode = [&] {
    if (nms_mode == "standard") return NmsMode::Standard;
    if (nms_mode == "rescored") return NmsMode::Rescored;
    if (nms_mode == "iou-nms") return NmsMode::IouNms;
    throw ConfigError("flag --nms-mode must be standard, rescored or iou-nms");
  }();
  nms_cfg.validate();

  const std::vector<Detection> dets = io::to_detections(det_records);
  std::map<std::pair<int, int>, std::vector<Detection>> groups;
  for (const auto& d : dets) groups[{d.image_id, d.cls}].push_back(d);

  std::vector<Detection> survivors;
  for (auto& [key, group] : groups) {
    std::vector<Detection> kept = nms(group, nms_cfg);
    survivors.insert(survivors.end(), kept.begin(), kept.end());
  }

  EvalConfig ecfg = EvalConfig::defaults();
  ecfg.ar_limits = ar_limits;
  EvalReport report =
      evaluate_detections(survivors, io::to_gt_records(gt_records), ecfg);
  for (int k : ecfg.ar_limits)
    report.ar_at_k[k] =
        average_recall(survivors, io::to_gt_records(gt_records), k, ecfg);

  const std::vector<DivergencePair> pairs = dump_pairs(det_records, gt_records);
  const SpearmanResult div = pooled_divergence(pairs);
  report.divergence = div.value;
  report.divergence_degenerate = div.degenerate;

  std::cout << io::eval_report_json(report, kDumpPopulation);
  return 0;
}

int cmd_divergence(const std::string& dets_path, const std::string& gts_path) {
  const auto det_records = io::read_detection_dump(dets_path);
  const auto gt_records = io::read_gt_dump(gts_path);
  const std::vector<DivergencePair> pairs = dump_pairs(det_records, gt_records);
  const SpearmanResult pooled = pooled_divergence(pairs);
  const SpearmanResult per_object = per_object_divergence(pairs);
  std::cout << io::divergence_report_json(pooled, per_object, pairs.size(),
                                          kDumpPopulation);
  return 0;
}

int cmd_benchmark(const CommonOpts& opts) {
  const BenchmarkConfig cfg = load_config(opts);
  const fs::path dir = ensure_out_dir(opts.out_dir);

  std::cerr << "benchmarking " << cfg.seeds.size() << " seeds x 4 cells\n";
  const BenchmarkReport report = run_benchmark(cfg);
  const std::string json = io::benchmark_report_json(report);
  const std::string table = io::benchmark_report_table(report);
  {
    std::ofstream out((dir / "benchmark.json").string(), std::ios::binary);
    out << json;
  }
  {
    std::ofstream out((dir / "benchmark.txt").string(), std::ios::binary);
    out << table;
  }
  std::cerr << table;
  std::cout << json;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "mlc: mutual labeling, IoU rescoring and divergence analysis for "
      "detection post-processing, with a seeded synthetic benchmark"};
  app.require_subcommand(1);

  CommonOpts sim_opts, train_opts, bench_opts;
  std::string dets_path, gts_path;
  std::string nms_mode = "standard";
  Scalar iou_threshold = 0.5;
  int max_out = 100;
  std::vector<int> ar_limits = {1, 3, 10};

  auto add_common = [](CLI::App* sub, CommonOpts& opts, bool need_out) {
    sub->add_option("--config", opts.config_path,
                    "JSON configuration file (schema 1)");
    auto* out =
        sub->add_option("--out", opts.out_dir, "output directory");
    if (need_out) out->required();
    sub->add_option("--seed", opts.seed_flag,
                    "override the scene seed from config/MLC_SEED");
  };

  CLI::App* simulate =
      app.add_subcommand("simulate", "generate seeded scenes and dumps");
  add_common(simulate, sim_opts, true);

  CLI::App* train_cmd =
      app.add_subcommand("train", "train the toy detector head");
  add_common(train_cmd, train_opts, true);

  CLI::App* eval_cmd = app.add_subcommand(
      "eval", "run NMS + AP/AR evaluation on detection dumps");
  eval_cmd->add_option("--dets", dets_path, "detections JSONL")->required();
  eval_cmd->add_option("--gts", gts_path, "ground-truth JSONL")->required();
  eval_cmd->add_option("--nms-mode", nms_mode,
                       "standard | rescored | iou-nms");
  eval_cmd->add_option("--iou-threshold", iou_threshold, "NMS IoU threshold");
  eval_cmd->add_option("--max-out", max_out, "NMS survivor cap");
  eval_cmd->add_option("--ar-limits", ar_limits, "top-k cutoffs for AR");

  CLI::App* div_cmd = app.add_subcommand(
      "divergence", "Spearman divergence metric of a detection dump");
  div_cmd->add_option("--dets", dets_path, "detections JSONL")->required();
  div_cmd->add_option("--gts", gts_path, "ground-truth JSONL")->required();

  CLI::App* bench_cmd = app.add_subcommand(
      "benchmark", "train and evaluate the {ML, IUR} ablation grid");
  add_common(bench_cmd, bench_opts, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) return cmd_simulate(sim_opts);
    if (*train_cmd) return cmd_train(train_opts);
    if (*eval_cmd)
      return cmd_eval(dets_path, gts_path, nms_mode, iou_threshold, max_out,
                      ar_limits);
    if (*div_cmd) return cmd_divergence(dets_path, gts_path);
    if (*bench_cmd) return cmd_benchmark(bench_opts);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
