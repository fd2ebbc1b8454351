#include "mlc/io.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace mlc::io {

namespace {

using njson = nlohmann::json;
using ojson = nlohmann::ordered_json;

std::string line_ctx(const std::string& path, std::size_t line_no) {
  return path + ":" + std::to_string(line_no);
}

njson parse_line(const std::string& path, std::size_t line_no,
                 const std::string& line) {
  njson j = njson::parse(line, nullptr, false);
  if (j.is_discarded())
    throw DataError(line_ctx(path, line_no) + ": not valid JSON");
  if (!j.is_object())
    throw DataError(line_ctx(path, line_no) + ": expected a JSON object");
  return j;
}

const njson& need(const njson& obj, const char* key, const std::string& ctx) {
  auto it = obj.find(key);
  if (it == obj.end())
    throw DataError(ctx + ": missing key \"" + key + "\"");
  return *it;
}

Scalar need_number(const njson& obj, const char* key, const std::string& ctx) {
  const njson& v = need(obj, key, ctx);
  if (!v.is_number())
    throw DataError(ctx + ": key \"" + key + "\" must be a number");
  return v.get<Scalar>();
}

int need_int(const njson& obj, const char* key, const std::string& ctx) {
  const njson& v = need(obj, key, ctx);
  if (!v.is_number_integer())
    throw DataError(ctx + ": key \"" + key + "\" must be an integer");
  return v.get<int>();
}

Box need_box(const njson& obj, const char* key, const std::string& ctx) {
  const njson& v = need(obj, key, ctx);
  if (!v.is_array() || v.size() != 4 ||
      !std::all_of(v.begin(), v.end(),
                   [](const njson& e) { return e.is_number(); }))
    throw DataError(ctx + ": key \"" + key +
                    "\" must be an array of 4 numbers");
  Box b{v[0].get<Scalar>(), v[1].get<Scalar>(), v[2].get<Scalar>(),
        v[3].get<Scalar>()};
  if (b.x1 > b.x2 || b.y1 > b.y2)
    throw DataError(ctx + ": key \"" + key +
                    "\" violates x1 <= x2 and y1 <= y2");
  return b;
}

Scalar need_unit(const njson& obj, const char* key, const std::string& ctx) {
  const Scalar v = need_number(obj, key, ctx);
  if (!(v >= 0 && v <= 1))
    throw DataError(ctx + ": key \"" + key + "\" must lie in [0, 1]");
  return v;
}

ojson box_json(const Box& b) { return ojson::array({b.x1, b.y1, b.x2, b.y2}); }

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << text;
}

std::string fmt_threshold(Scalar t) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.2f", t);
  return buf;
}

}  // namespace

std::vector<DetectionDumpRecord> read_detection_dump(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);

  std::vector<DetectionDumpRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string ctx = line_ctx(path, line_no);
    const njson j = parse_line(path, line_no, line);
    for (const auto& [key, value] : j.items())
      if (key != "image_id" && key != "class" && key != "box" &&
          key != "raw_conf" && key != "iou_pred")
        throw DataError(ctx + ": unknown key \"" + key + "\"");

    DetectionDumpRecord rec;
    rec.image_id = need_int(j, "image_id", ctx);
    rec.cls = need_int(j, "class", ctx);
    rec.box = need_box(j, "box", ctx);
    rec.raw_conf = need_unit(j, "raw_conf", ctx);
    if (j.contains("iou_pred") && !j["iou_pred"].is_null())
      rec.iou_pred = need_unit(j, "iou_pred", ctx);
    out.push_back(rec);
  }
  return out;
}

std::vector<GroundTruthDumpRecord> read_gt_dump(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);

  std::vector<GroundTruthDumpRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string ctx = line_ctx(path, line_no);
    const njson j = parse_line(path, line_no, line);
    for (const auto& [key, value] : j.items())
      if (key != "image_id" && key != "object_id" && key != "class" &&
          key != "box")
        throw DataError(ctx + ": unknown key \"" + key + "\"");

    GroundTruthDumpRecord rec;
    rec.image_id = need_int(j, "image_id", ctx);
    rec.object_id = need_int(j, "object_id", ctx);
    rec.cls = need_int(j, "class", ctx);
    rec.box = need_box(j, "box", ctx);
    if (rec.box.degenerate())
      throw DataError(ctx + ": key \"box\" must be non-degenerate");
    out.push_back(rec);
  }
  return out;
}

void write_detection_dump(const std::string& path,
                          const std::vector<DetectionDumpRecord>& records) {
  std::ostringstream ss;
  for (const auto& r : records) {
    ojson j;
    j["image_id"] = r.image_id;
    j["class"] = r.cls;
    j["box"] = box_json(r.box);
    j["raw_conf"] = r.raw_conf;
    if (r.iou_pred) j["iou_pred"] = *r.iou_pred;
    ss << j.dump() << "\n";
  }
  write_file(path, ss.str());
}

void write_gt_dump(const std::string& path,
                   const std::vector<GroundTruthDumpRecord>& records) {
  std::ostringstream ss;
  for (const auto& r : records) {
    ojson j;
    j["image_id"] = r.image_id;
    j["object_id"] = r.object_id;
    j["class"] = r.cls;
    j["box"] = box_json(r.box);
    ss << j.dump() << "\n";
  }
  write_file(path, ss.str());
}

std::vector<Detection> to_detections(
    const std::vector<DetectionDumpRecord>& records) {
  std::vector<Detection> out;
  out.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    Detection d;
    d.id = static_cast<int>(i);
    d.image_id = r.image_id;
    d.cls = r.cls;
    d.box = r.box;
    d.raw_conf = r.raw_conf;
    d.score = r.raw_conf;
    d.iou_pred = r.iou_pred;
    out.push_back(d);
  }
  return out;
}

std::vector<GtRecord> to_gt_records(
    const std::vector<GroundTruthDumpRecord>& records) {
  std::vector<GtRecord> out;
  out.reserve(records.size());
  for (const auto& r : records)
    out.push_back(GtRecord{r.image_id, r.object_id, r.cls, r.box});
  return out;
}

void write_scenes(const std::string& path, const std::vector<Scene>& scenes) {
  std::ostringstream ss;
  for (const auto& s : scenes) {
    ojson j;
    j["image_id"] = s.image_id;
    j["image_size"] = ojson::array({s.image_w, s.image_h});
    ojson gts = ojson::array();
    for (const auto& gt : s.gts) {
      ojson g;
      g["object_id"] = gt.id;
      g["class"] = gt.label;
      g["box"] = box_json(gt.box);
      gts.push_back(g);
    }
    j["gts"] = gts;
    ojson priors = ojson::array();
    for (const auto& p : s.priors) priors.push_back(box_json(p));
    j["priors"] = priors;
    ojson feats = ojson::array();
    for (const auto& f : s.features) {
      ojson row = ojson::array();
      for (int i = 0; i < f.size(); ++i) row.push_back(f[i]);
      feats.push_back(row);
    }
    j["features"] = feats;
    ss << j.dump() << "\n";
  }
  write_file(path, ss.str());
}

std::vector<Scene> read_scenes(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);

  std::vector<Scene> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string ctx = line_ctx(path, line_no);
    const njson j = parse_line(path, line_no, line);

    Scene s;
    s.image_id = need_int(j, "image_id", ctx);
    const njson& size = need(j, "image_size", ctx);
    if (!size.is_array() || size.size() != 2)
      throw DataError(ctx + ": key \"image_size\" must be [w, h]");
    s.image_w = size[0].get<int>();
    s.image_h = size[1].get<int>();

    const njson& gts_arr = need(j, "gts", ctx);
    if (!gts_arr.is_array())
      throw DataError(ctx + ": key \"gts\" must be an array");
    for (const auto& g : gts_arr) {
      GroundTruth gt;
      gt.id = need_int(g, "object_id", ctx);
      gt.label = need_int(g, "class", ctx);
      gt.box = need_box(g, "box", ctx);
      s.gts.push_back(gt);
    }
    const njson& priors_arr = need(j, "priors", ctx);
    if (!priors_arr.is_array())
      throw DataError(ctx + ": key \"priors\" must be an array");
    for (const auto& p : priors_arr) {
      if (!p.is_array() || p.size() != 4)
        throw DataError(ctx + ": prior entries must be arrays of 4 numbers");
      s.priors.push_back(
          Box{p[0].get<Scalar>(), p[1].get<Scalar>(), p[2].get<Scalar>(),
              p[3].get<Scalar>()});
    }
    const njson& feats_arr = need(j, "features", ctx);
    if (!feats_arr.is_array())
      throw DataError(ctx + ": key \"features\" must be an array");
    for (const auto& row : feats_arr) {
      if (!row.is_array())
        throw DataError(ctx + ": feature entries must be arrays");
      VectorX f(row.size());
      for (std::size_t i = 0; i < row.size(); ++i) f[i] = row[i].get<Scalar>();
      s.features.push_back(std::move(f));
    }
    if (s.features.size() != s.priors.size())
      throw DataError(ctx + ": priors and features differ in length");
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<GroundTruthDumpRecord> scene_gt_records(
    const std::vector<Scene>& scenes) {
  std::vector<GroundTruthDumpRecord> out;
  for (const auto& s : scenes)
    for (const auto& gt : s.gts)
      out.push_back(GroundTruthDumpRecord{s.image_id, gt.id, gt.label, gt.box});
  return out;
}

void save_checkpoint(const std::string& path, const HeadParams& params) {
  ojson j;
  j["schema"] = 1;
  j["kind"] = "mlc-checkpoint";
  j["classes"] = params.classes();
  j["dim"] = params.dim();
  ojson arrays;
  const auto put_matrix = [&](const char* name, const MatrixX& m) {
    ojson flat = ojson::array();
    for (int r = 0; r < m.rows(); ++r)
      for (int c = 0; c < m.cols(); ++c) flat.push_back(m(r, c));
    arrays[name] = flat;
  };
  put_matrix("w_cls", params.w_cls);
  arrays["b_cls"] = ojson::array();
  for (int i = 0; i < params.b_cls.size(); ++i)
    arrays["b_cls"].push_back(params.b_cls[i]);
  put_matrix("w_loc", params.w_loc);
  arrays["b_loc"] = ojson::array();
  for (int i = 0; i < 4; ++i) arrays["b_loc"].push_back(params.b_loc[i]);
  arrays["w_iur"] = ojson::array();
  for (int i = 0; i < params.w_iur.size(); ++i)
    arrays["w_iur"].push_back(params.w_iur[i]);
  arrays["b_iur"] = params.b_iur;
  j["arrays"] = arrays;
  write_file(path, j.dump(2) + "\n");
}

HeadParams load_checkpoint(const std::string& path) {
  const njson j = njson::parse(read_file(path), nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw DataError(path + ": not a valid checkpoint document");
  if (!j.contains("schema") || j["schema"] != 1)
    throw DataError(path + ": unsupported checkpoint schema");
  if (!j.contains("kind") || j["kind"] != "mlc-checkpoint")
    throw DataError(path + ": key \"kind\" must be \"mlc-checkpoint\"");

  const int classes = need_int(j, "classes", path);
  const int dim = need_int(j, "dim", path);
  const njson& arrays = need(j, "arrays", path);

  HeadParams p = HeadParams::zeros(classes, dim);
  const auto read_flat = [&](const char* name, std::size_t expect) {
    const njson& a = need(arrays, name, path);
    if (!a.is_array() || a.size() != expect)
      throw DataError(path + ": array \"" + name + "\" must have " +
                      std::to_string(expect) + " entries");
    return a;
  };
  const njson& w_cls = read_flat("w_cls", static_cast<std::size_t>(classes) * dim);
  for (int r = 0; r < classes; ++r)
    for (int c = 0; c < dim; ++c)
      p.w_cls(r, c) = w_cls[static_cast<std::size_t>(r) * dim + c].get<Scalar>();
  const njson& b_cls = read_flat("b_cls", classes);
  for (int i = 0; i < classes; ++i) p.b_cls[i] = b_cls[i].get<Scalar>();
  const njson& w_loc = read_flat("w_loc", static_cast<std::size_t>(4) * dim);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < dim; ++c)
      p.w_loc(r, c) = w_loc[static_cast<std::size_t>(r) * dim + c].get<Scalar>();
  const njson& b_loc = read_flat("b_loc", 4);
  for (int i = 0; i < 4; ++i) p.b_loc[i] = b_loc[i].get<Scalar>();
  const njson& w_iur = read_flat("w_iur", dim);
  for (int i = 0; i < dim; ++i) p.w_iur[i] = w_iur[i].get<Scalar>();
  p.b_iur = need_number(arrays, "b_iur", path);
  return p;
}

namespace {

// ---- configuration ---------------------------------------------------

[[noreturn]] void bad_key(const std::string& key, const std::string& why) {
  throw ConfigError("config: key \"" + key + "\" " + why);
}

void check_object(const njson& o, const std::string& section,
                  std::initializer_list<const char*> allowed) {
  if (!o.is_object()) bad_key(section, "must be an object");
  for (const auto& [key, value] : o.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) ok = true;
    if (!ok)
      throw ConfigError("config: unknown key \"" + section + "." + key + "\"");
  }
}

Scalar cfg_number(const njson& o, const std::string& section, const char* key,
                  Scalar fallback) {
  if (!o.contains(key)) return fallback;
  if (!o[key].is_number()) bad_key(section + "." + key, "must be a number");
  return o[key].get<Scalar>();
}

int cfg_int(const njson& o, const std::string& section, const char* key,
            int fallback) {
  if (!o.contains(key)) return fallback;
  if (!o[key].is_number_integer())
    bad_key(section + "." + key, "must be an integer");
  return o[key].get<int>();
}

std::string cfg_string(const njson& o, const std::string& section,
                       const char* key, const std::string& fallback) {
  if (!o.contains(key)) return fallback;
  if (!o[key].is_string()) bad_key(section + "." + key, "must be a string");
  return o[key].get<std::string>();
}

void parse_scene(const njson& o, SceneConfig& cfg) {
  check_object(o, "scene",
               {"image_size", "objects_per_scene", "classes", "prior_stride",
                "prior_size", "feature_dim", "divergence_bias", "noise_sigma",
                "seed", "object_size", "max_gt_overlap"});
  if (o.contains("image_size")) {
    const njson& v = o["image_size"];
    if (!v.is_array() || v.size() != 2)
      bad_key("scene.image_size", "must be [w, h]");
    cfg.image_w = v[0].get<int>();
    cfg.image_h = v[1].get<int>();
  }
  if (o.contains("objects_per_scene")) {
    const njson& v = o["objects_per_scene"];
    if (!v.is_array() || v.size() != 2)
      bad_key("scene.objects_per_scene", "must be [min, max]");
    cfg.objects_min = v[0].get<int>();
    cfg.objects_max = v[1].get<int>();
  }
  cfg.classes = cfg_int(o, "scene", "classes", cfg.classes);
  cfg.prior_stride = cfg_number(o, "scene", "prior_stride", cfg.prior_stride);
  cfg.prior_size = cfg_number(o, "scene", "prior_size", cfg.prior_size);
  cfg.feature_dim = cfg_int(o, "scene", "feature_dim", cfg.feature_dim);
  cfg.divergence_bias =
      cfg_number(o, "scene", "divergence_bias", cfg.divergence_bias);
  cfg.noise_sigma = cfg_number(o, "scene", "noise_sigma", cfg.noise_sigma);
  if (o.contains("seed")) {
    if (!o["seed"].is_number_integer()) bad_key("scene.seed", "must be an integer");
    cfg.seed = o["seed"].get<std::uint64_t>();
  }
  if (o.contains("object_size")) {
    const njson& v = o["object_size"];
    if (!v.is_array() || v.size() != 2)
      bad_key("scene.object_size", "must be [min, max]");
    cfg.object_min_size = v[0].get<Scalar>();
    cfg.object_max_size = v[1].get<Scalar>();
  }
  cfg.max_gt_overlap =
      cfg_number(o, "scene", "max_gt_overlap", cfg.max_gt_overlap);
}

void parse_assignment(const njson& o, AssignmentConfig& cfg) {
  check_object(o, "train.assignment",
               {"alpha", "matcher", "iou_band", "min_candidates"});
  cfg.alpha = cfg_number(o, "train.assignment", "alpha", cfg.alpha);
  const std::string matcher = cfg_string(
      o, "train.assignment", "matcher",
      cfg.matcher == MatcherKind::IouBand ? "iou-band" : "inside-box");
  if (matcher == "iou-band")
    cfg.matcher = MatcherKind::IouBand;
  else if (matcher == "inside-box")
    cfg.matcher = MatcherKind::InsideBox;
  else
    bad_key("train.assignment.matcher",
            "must be \"iou-band\" or \"inside-box\"");
  if (o.contains("iou_band")) {
    const njson& v = o["iou_band"];
    if (!v.is_array() || v.size() != 2)
      bad_key("train.assignment.iou_band", "must be [low, high]");
    cfg.band_low = v[0].get<Scalar>();
    cfg.band_high = v[1].get<Scalar>();
  }
  cfg.min_candidates =
      cfg_int(o, "train.assignment", "min_candidates", cfg.min_candidates);
}

void parse_losses(const njson& o, LossConfig& cfg) {
  check_object(o, "train.losses", {"gamma", "loc_loss", "smooth_l1_beta"});
  cfg.gamma = cfg_number(o, "train.losses", "gamma", cfg.gamma);
  const std::string kind = cfg_string(
      o, "train.losses", "loc_loss",
      cfg.loc_loss == LossConfig::LocLossKind::SmoothL1 ? "smooth-l1" : "iou");
  if (kind == "smooth-l1")
    cfg.loc_loss = LossConfig::LocLossKind::SmoothL1;
  else if (kind == "iou")
    cfg.loc_loss = LossConfig::LocLossKind::Iou;
  else
    bad_key("train.losses.loc_loss", "must be \"smooth-l1\" or \"iou\"");
  cfg.smooth_l1_beta =
      cfg_number(o, "train.losses", "smooth_l1_beta", cfg.smooth_l1_beta);
}

NmsMode parse_nms_mode_string(const std::string& mode, const std::string& key) {
  if (mode == "standard") return NmsMode::Standard;
  if (mode == "rescored") return NmsMode::Rescored;
  if (mode == "iou-nms") return NmsMode::IouNms;
  throw ConfigError("config: key \"" + key +
                    "\" must be \"standard\", \"rescored\" or \"iou-nms\"");
}

void parse_nms(const njson& o, NmsConfig& cfg) {
  check_object(o, "train.nms", {"iou_threshold", "mode", "max_out"});
  cfg.iou_threshold =
      cfg_number(o, "train.nms", "iou_threshold", cfg.iou_threshold);
  if (o.contains("mode"))
    cfg.mode = parse_nms_mode_string(o["mode"].get<std::string>(),
                                     "train.nms.mode");
  cfg.max_out = cfg_int(o, "train.nms", "max_out", cfg.max_out);
}

void parse_eval(const njson& o, EvalConfig& cfg) {
  check_object(o, "train.eval",
               {"iou_thresholds", "recall_points", "ar_limits"});
  if (o.contains("iou_thresholds")) {
    const njson& v = o["iou_thresholds"];
    if (!v.is_array()) bad_key("train.eval.iou_thresholds", "must be an array");
    cfg.iou_thresholds.clear();
    for (const auto& t : v) cfg.iou_thresholds.push_back(t.get<Scalar>());
  }
  cfg.recall_points =
      cfg_int(o, "train.eval", "recall_points", cfg.recall_points);
  if (o.contains("ar_limits")) {
    const njson& v = o["ar_limits"];
    if (!v.is_array()) bad_key("train.eval.ar_limits", "must be an array");
    cfg.ar_limits.clear();
    for (const auto& k : v) cfg.ar_limits.push_back(k.get<int>());
  }
}

void parse_train(const njson& o, TrainConfig& cfg) {
  check_object(o, "train",
               {"epochs", "scenes_per_epoch", "val_scenes", "lr",
                "lr_drop_epochs", "lr_drop_factor", "mlc_enable_epoch",
                "baseline_mode", "score_threshold", "init_scale", "assignment",
                "losses", "nms", "eval"});
  cfg.epochs = cfg_int(o, "train", "epochs", cfg.epochs);
  cfg.scenes_per_epoch =
      cfg_int(o, "train", "scenes_per_epoch", cfg.scenes_per_epoch);
  cfg.val_scenes = cfg_int(o, "train", "val_scenes", cfg.val_scenes);
  cfg.lr = cfg_number(o, "train", "lr", cfg.lr);
  if (o.contains("lr_drop_epochs")) {
    const njson& v = o["lr_drop_epochs"];
    if (!v.is_array()) bad_key("train.lr_drop_epochs", "must be an array");
    cfg.lr_drop_epochs.clear();
    for (const auto& e : v) cfg.lr_drop_epochs.push_back(e.get<int>());
  }
  cfg.lr_drop_factor =
      cfg_number(o, "train", "lr_drop_factor", cfg.lr_drop_factor);
  cfg.mlc_enable_epoch =
      cfg_int(o, "train", "mlc_enable_epoch", cfg.mlc_enable_epoch);
  const std::string mode = cfg_string(
      o, "train", "baseline_mode",
      cfg.baseline_mode == TrainConfig::BaselineMode::MutualLabeling
          ? "mutual-labeling"
          : "fixed-threshold");
  if (mode == "mutual-labeling")
    cfg.baseline_mode = TrainConfig::BaselineMode::MutualLabeling;
  else if (mode == "fixed-threshold")
    cfg.baseline_mode = TrainConfig::BaselineMode::FixedThreshold;
  else
    bad_key("train.baseline_mode",
            "must be \"fixed-threshold\" or \"mutual-labeling\"");
  cfg.score_threshold =
      cfg_number(o, "train", "score_threshold", cfg.score_threshold);
  cfg.init_scale = cfg_number(o, "train", "init_scale", cfg.init_scale);
  if (o.contains("assignment")) parse_assignment(o["assignment"], cfg.assignment);
  if (o.contains("losses")) parse_losses(o["losses"], cfg.losses);
  if (o.contains("nms")) parse_nms(o["nms"], cfg.nms);
  if (o.contains("eval")) parse_eval(o["eval"], cfg.eval);
}

void parse_benchmark(const njson& o, BenchmarkConfig& cfg) {
  check_object(o, "benchmark", {"seeds", "iou_noise_sigma", "alpha_sweep"});
  if (o.contains("seeds")) {
    const njson& v = o["seeds"];
    if (!v.is_array()) bad_key("benchmark.seeds", "must be an array");
    cfg.seeds.clear();
    for (const auto& s : v) cfg.seeds.push_back(s.get<std::uint64_t>());
  }
  cfg.iou_noise_sigma =
      cfg_number(o, "benchmark", "iou_noise_sigma", cfg.iou_noise_sigma);
  if (o.contains("alpha_sweep")) {
    const njson& v = o["alpha_sweep"];
    if (!v.is_array()) bad_key("benchmark.alpha_sweep", "must be an array");
    cfg.alpha_sweep.clear();
    for (const auto& a : v) cfg.alpha_sweep.push_back(a.get<Scalar>());
  }
}

}  // namespace

BenchmarkConfig default_config() {
  BenchmarkConfig cfg;
  // Desk-scale recall cutoffs; scenes hold at most a handful of objects.
  cfg.train.eval.ar_limits = {1, 3, 10};
  // Default detector analogue: every prior inside a box is a candidate
  // positive and ignored-sample weighting is off.
  cfg.train.assignment.matcher = MatcherKind::InsideBox;
  cfg.train.assignment.alpha = 0;
  return cfg;
}

BenchmarkConfig parse_config_text(const std::string& text,
                                  const BenchmarkConfig& base) {
  const njson j = njson::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw ConfigError("config: not a valid JSON object");
  check_object(j, "config", {"schema", "scene", "train", "benchmark"});
  if (!j.contains("schema"))
    throw ConfigError("config: missing key \"schema\"");
  if (!j["schema"].is_number_integer() || j["schema"].get<int>() != 1)
    throw ConfigError("config: key \"schema\" must be 1");

  BenchmarkConfig cfg = base;
  if (j.contains("scene")) parse_scene(j["scene"], cfg.scene);
  if (j.contains("train")) parse_train(j["train"], cfg.train);
  if (j.contains("benchmark")) parse_benchmark(j["benchmark"], cfg);

  cfg.scene.validate();
  cfg.train.validate();
  return cfg;
}

BenchmarkConfig parse_config_file(const std::string& path,
                                  const BenchmarkConfig& base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), base);
}

// ---- reports -----------------------------------------------------------

std::string eval_report_json(const EvalReport& report,
                             const std::string& population) {
  ojson j;
  j["schema"] = 1;
  j["ap"] = report.ap;
  const Scalar ap50 = report.ap_at(0.5);
  const Scalar ap75 = report.ap_at(0.75);
  if (!std::isnan(ap50)) j["ap50"] = ap50;
  if (!std::isnan(ap75)) j["ap75"] = ap75;
  ojson per_t;
  for (const auto& [t, v] : report.ap_per_threshold) per_t[fmt_threshold(t)] = v;
  j["ap_per_threshold"] = per_t;
  ojson ar;
  for (const auto& [k, v] : report.ar_at_k) ar[std::to_string(k)] = v;
  j["ar_at_k"] = ar;
  j["divergence"] = report.divergence;
  j["divergence_degenerate"] = report.divergence_degenerate;
  j["divergence_population"] = population;
  return j.dump(2) + "\n";
}

std::string divergence_report_json(const SpearmanResult& pooled,
                                   const SpearmanResult& per_object,
                                   std::size_t n_pairs,
                                   const std::string& population) {
  ojson j;
  j["schema"] = 1;
  j["pooled"] = pooled.value;
  j["pooled_degenerate"] = pooled.degenerate;
  j["per_object_mean"] = per_object.value;
  j["per_object_degenerate"] = per_object.degenerate;
  j["pairs"] = n_pairs;
  j["population"] = population;
  return j.dump(2) + "\n";
}

std::string train_log_jsonl(const std::vector<EpochLog>& log) {
  std::ostringstream ss;
  for (const auto& e : log) {
    ojson j;
    j["epoch"] = e.epoch;
    j["lr"] = e.lr;
    j["mlc_active"] = e.mlc_active;
    j["mean_total"] = e.mean_total;
    j["mean_cls"] = e.mean_cls;
    j["mean_loc"] = e.mean_loc;
    j["mean_iur"] = e.mean_iur;
    j["val_divergence"] = e.val_divergence;
    j["val_divergence_degenerate"] = e.val_divergence_degenerate;
    j["val_ap"] = e.val_ap;
    ss << j.dump() << "\n";
  }
  return ss.str();
}

std::string train_report_json(const ValMetrics& metrics, int epochs) {
  ojson j;
  j["schema"] = 1;
  j["epochs"] = epochs;
  j["val_ap"] = metrics.ap;
  ojson per_t;
  for (const auto& [t, v] : metrics.ap_per_threshold)
    per_t[fmt_threshold(t)] = v;
  j["val_ap_per_threshold"] = per_t;
  ojson ar;
  for (const auto& [k, v] : metrics.ar_at_k) ar[std::to_string(k)] = v;
  j["val_ar_at_k"] = ar;
  j["val_divergence"] = metrics.divergence.value;
  j["val_divergence_degenerate"] = metrics.divergence.degenerate;
  return j.dump(2) + "\n";
}

std::string benchmark_report_json(const BenchmarkReport& report) {
  ojson j;
  j["schema"] = 1;
  j["seeds"] = report.seeds;

  ojson cells = ojson::array();
  for (const auto& c : report.cells) {
    ojson cell;
    cell["ml"] = c.ml;
    cell["iur"] = c.iur;
    cell["ap"] = c.ap;
    cell["divergence"] = c.divergence;
    ojson ar;
    for (const auto& [k, v] : c.ar_at_k) ar[std::to_string(k)] = v;
    cell["ar_at_k"] = ar;
    ojson per_seed;
    per_seed["ap"] = c.ap_per_seed;
    per_seed["divergence"] = c.divergence_per_seed;
    ojson ar_seed;
    for (const auto& [k, v] : c.ar_per_seed) ar_seed[std::to_string(k)] = v;
    per_seed["ar_at_k"] = ar_seed;
    cell["per_seed"] = per_seed;
    cells.push_back(cell);
  }
  j["cells"] = cells;

  ojson nms;
  nms["ap_standard"] = report.nms.ap_standard;
  nms["ap_rescored"] = report.nms.ap_rescored;
  nms["ap_rescored_noised"] = report.nms.ap_rescored_noised;
  nms["ap_iou_nms_noised"] = report.nms.ap_iou_nms_noised;
  ojson nms_seed;
  nms_seed["ap_standard"] = report.nms.per_seed_standard;
  nms_seed["ap_rescored"] = report.nms.per_seed_rescored;
  nms_seed["ap_rescored_noised"] = report.nms.per_seed_rescored_noised;
  nms_seed["ap_iou_nms_noised"] = report.nms.per_seed_iou_nms_noised;
  nms["per_seed"] = nms_seed;
  j["nms_comparison"] = nms;

  ojson checks = ojson::array();
  for (const auto& c : report.checks) {
    ojson chk;
    chk["name"] = c.name;
    chk["pass"] = c.pass;
    chk["value"] = c.value;
    chk["threshold"] = c.threshold;
    checks.push_back(chk);
  }
  j["checks"] = checks;

  if (!report.alpha_sweep.empty()) {
    ojson sweep = ojson::array();
    for (const auto& e : report.alpha_sweep) {
      ojson entry;
      entry["alpha"] = e.alpha;
      entry["ap"] = e.ap;
      entry["divergence"] = e.divergence;
      sweep.push_back(entry);
    }
    j["alpha_sweep"] = sweep;
  }
  return j.dump(2) + "\n";
}

std::string benchmark_report_table(const BenchmarkReport& report) {
  std::ostringstream ss;
  char buf[256];
  ss << "ml   iur  AP       divergence";
  const auto& first = report.cells.front();
  for (const auto& [k, v] : first.ar_at_k) {
    std::snprintf(buf, sizeof buf, "  AR@%-4d", k);
    ss << buf;
  }
  ss << "\n";
  for (const auto& c : report.cells) {
    std::snprintf(buf, sizeof buf, "%-4s %-4s %.4f   %+.4f   ",
                  c.ml ? "on" : "off", c.iur ? "on" : "off", c.ap,
                  c.divergence);
    ss << buf;
    for (const auto& [k, v] : c.ar_at_k) {
      std::snprintf(buf, sizeof buf, "%.4f   ", v);
      ss << buf;
    }
    ss << "\n";
  }
  ss << "\n";
  std::snprintf(buf, sizeof buf,
                "nms on the iur-only model: standard %.4f, rescored %.4f, "
                "rescored+noise %.4f, iou-nms+noise %.4f\n",
                report.nms.ap_standard, report.nms.ap_rescored,
                report.nms.ap_rescored_noised, report.nms.ap_iou_nms_noised);
  ss << buf;
  ss << "\n";
  for (const auto& c : report.checks) {
    std::snprintf(buf, sizeof buf, "%-4s %-32s value %+.4f (required > %+.4f)\n",
                  c.pass ? "PASS" : "FAIL", c.name.c_str(), c.value,
                  c.threshold);
    ss << buf;
  }
  if (!report.alpha_sweep.empty()) {
    ss << "\nalpha sweep (ml+iur): alpha -> AP, divergence\n";
    for (const auto& e : report.alpha_sweep) {
      std::snprintf(buf, sizeof buf, "  %.3f -> %.4f, %+.4f\n", e.alpha, e.ap,
                    e.divergence);
      ss << buf;
    }
  }
  return ss.str();
}

}  // namespace mlc::io
