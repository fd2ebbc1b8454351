#pragma once

#include "mlc/eval.hpp"
#include "mlc/model.hpp"
#include "mlc/postprocess.hpp"
#include "mlc/sim.hpp"
#include "mlc/types.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mlc::io {

/// One detection per JSON line: image_id, class, box [x1,y1,x2,y2],
/// raw_conf, optional iou_pred.
struct DetectionDumpRecord {
  int image_id = 0;
  int cls = 0;
  Box box;
  Scalar raw_conf = 0;
  std::optional<Scalar> iou_pred;
};

/// One ground-truth object per JSON line: image_id, object_id, class, box.
struct GroundTruthDumpRecord {
  int image_id = 0;
  int object_id = 0;
  int cls = 0;
  Box box;
};

// JSONL dump parsing; a malformed line raises DataError naming the 1-based
// line number and the offending key.
std::vector<DetectionDumpRecord> read_detection_dump(const std::string& path);
std::vector<GroundTruthDumpRecord> read_gt_dump(const std::string& path);

void write_detection_dump(const std::string& path,
                          const std::vector<DetectionDumpRecord>& records);
void write_gt_dump(const std::string& path,
                   const std::vector<GroundTruthDumpRecord>& records);

/// Detections with ids assigned in line order (the NMS tie-break order).
std::vector<Detection> to_detections(
    const std::vector<DetectionDumpRecord>& records);
std::vector<GtRecord> to_gt_records(
    const std::vector<GroundTruthDumpRecord>& records);

// Full scene serialization (JSONL, one scene per line) and the ground-truth
// dump view of a scene list.
void write_scenes(const std::string& path, const std::vector<Scene>& scenes);
std::vector<Scene> read_scenes(const std::string& path);
std::vector<GroundTruthDumpRecord> scene_gt_records(
    const std::vector<Scene>& scenes);

// Head checkpoints: versioned JSON of named flat arrays.
void save_checkpoint(const std::string& path, const HeadParams& params);
HeadParams load_checkpoint(const std::string& path);

/// Default configuration used when keys are omitted (desk-scale settings).
BenchmarkConfig default_config();

/// Whole tool configuration; the benchmark section wraps the scene and
/// train sections it shares with the other commands. Keys absent from the
/// document keep their values from `base`.
BenchmarkConfig parse_config_text(const std::string& text,
                                  const BenchmarkConfig& base = default_config());
BenchmarkConfig parse_config_file(const std::string& path,
                                  const BenchmarkConfig& base = default_config());

// Report serialization. All report writers emit stable key order so that
// identical inputs give byte-identical documents.
std::string eval_report_json(const EvalReport& report,
                             const std::string& population);
std::string divergence_report_json(const SpearmanResult& pooled,
                                   const SpearmanResult& per_object,
                                   std::size_t n_pairs,
                                   const std::string& population);
std::string train_log_jsonl(const std::vector<EpochLog>& log);
std::string train_report_json(const ValMetrics& metrics, int epochs);
std::string benchmark_report_json(const BenchmarkReport& report);
std::string benchmark_report_table(const BenchmarkReport& report);

}  // namespace mlc::io
