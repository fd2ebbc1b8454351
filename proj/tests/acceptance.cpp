// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Oracles come from tests/oracles.hpp and are independent
// of the library code paths they check.
#include "mlc/io.hpp"
#include "mlc/losses.hpp"
#include "mlc/sim.hpp"
#include "mlc/thresholding.hpp"

#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <vector>

using namespace mlc;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

// ---- criterion 1: Otsu equals exhaustive brute force -------------------

Outcome otsu_oracle() {
  const auto start = Clock::now();
  Rng rng(0xACCE5501);
  int failures = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = static_cast<int>(rng.uniform_int(2, 64));
    std::vector<Scalar> v(n);
    const bool quantized = trial % 3 == 0;
    for (auto& x : v) {
      x = rng.uniform();
      if (quantized) x = std::round(x * 16) / 16;
    }
    if (otsu_threshold(v) != oracle::brute_otsu(v)) ++failures;
  }
  const double elapsed = seconds_since(start);
  return {failures == 0 && elapsed < 5.0,
          "1000 sets, " + std::to_string(failures) + " mismatches, " +
              fmt(elapsed) + "s (< 5s)"};
}

// ---- criterion 2: NMS equals brute force in all three modes -------------

Outcome nms_oracle() {
  const auto start = Clock::now();
  Rng rng(0xACCE5502);
  int failures = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const int n = static_cast<int>(rng.uniform_int(0, 20));
    std::vector<Detection> dets;
    for (int i = 0; i < n; ++i) {
      Detection d;
      d.id = i;
      const Scalar x = rng.uniform(0, 30), y = rng.uniform(0, 30);
      d.box = Box{x, y, x + rng.uniform(4, 16), y + rng.uniform(4, 16)};
      d.raw_conf = trial % 5 == 0 ? std::round(rng.uniform() * 4) / 4
                                  : rng.uniform();
      d.score = d.raw_conf;
      d.iou_pred = rng.uniform();
      dets.push_back(d);
    }
    for (NmsMode mode :
         {NmsMode::Standard, NmsMode::Rescored, NmsMode::IouNms}) {
      NmsConfig cfg;
      cfg.mode = mode;
      cfg.iou_threshold = rng.uniform(0.2, 0.8);
      cfg.max_out = trial % 4 == 0 ? 3 : 100;
      const auto mine = nms(dets, cfg);
      const auto ref = oracle::brute_nms(dets, cfg);
      bool same = mine.size() == ref.size();
      for (std::size_t i = 0; same && i < mine.size(); ++i)
        same = mine[i].id == ref[i].id && mine[i].score == ref[i].score &&
               mine[i].raw_conf == ref[i].raw_conf;
      if (!same) ++failures;
    }
  }
  const double elapsed = seconds_since(start);
  return {failures == 0 && elapsed < 10.0,
          "500 sets x 3 modes, " + std::to_string(failures) + " mismatches, " +
              fmt(elapsed) + "s (< 10s)"};
}

// ---- criterion 3: AP/AR equals brute-force PR computation ---------------

Outcome eval_oracle() {
  Rng rng(0xACCE5503);
  EvalConfig cfg = EvalConfig::defaults();
  cfg.ar_limits = {1, 3, 10};
  int failures = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int images = static_cast<int>(rng.uniform_int(1, 2));
    std::vector<GtRecord> gts;
    const int n_gts = static_cast<int>(rng.uniform_int(0, 5));
    for (int g = 0; g < n_gts; ++g) {
      const Scalar x = rng.uniform(0, 30), y = rng.uniform(0, 30);
      gts.push_back(GtRecord{static_cast<int>(rng.uniform_int(0, images - 1)),
                             g, static_cast<int>(rng.uniform_int(0, 1)),
                             Box{x, y, x + rng.uniform(6, 14),
                                 y + rng.uniform(6, 14)}});
    }
    std::vector<Detection> dets;
    const int n_dets = static_cast<int>(rng.uniform_int(0, 10));
    for (int i = 0; i < n_dets; ++i) {
      Detection d;
      d.id = i;
      d.image_id = static_cast<int>(rng.uniform_int(0, images - 1));
      d.cls = static_cast<int>(rng.uniform_int(0, 1));
      if (!gts.empty() && rng.uniform() < 0.7) {
        const auto& gt =
            gts[static_cast<std::size_t>(rng.uniform_int(0, n_gts - 1))];
        const Scalar jx = rng.uniform(-4, 4), jy = rng.uniform(-4, 4);
        d.box = Box{gt.box.x1 + jx, gt.box.y1 + jy, gt.box.x2 + jx,
                    gt.box.y2 + jy};
      } else {
        const Scalar x = rng.uniform(0, 30), y = rng.uniform(0, 30);
        d.box = Box{x, y, x + rng.uniform(4, 12), y + rng.uniform(4, 12)};
      }
      d.raw_conf = trial % 4 == 0 ? std::round(rng.uniform() * 4) / 4
                                  : rng.uniform();
      d.score = d.raw_conf;
      dets.push_back(d);
    }

    // AP reference: per class present in the ground truth, per threshold.
    std::set<int> classes;
    for (const auto& g : gts) classes.insert(g.cls);
    Scalar ap_sum = 0;
    for (Scalar t : cfg.iou_thresholds) {
      Scalar cls_sum = 0;
      int cls_n = 0;
      for (int c : classes) {
        std::vector<Detection> cd;
        std::vector<GtRecord> cg;
        for (const auto& d : dets)
          if (d.cls == c) cd.push_back(d);
        for (const auto& g : gts)
          if (g.cls == c) cg.push_back(g);
        const auto order = score_ranking(cd);
        const auto tp = oracle::brute_match(cd, order, cg, t, false);
        const Scalar ap =
            oracle::brute_ap(std::vector<char>(tp.begin(), tp.end()),
                             static_cast<int>(cg.size()), cfg.recall_points);
        if (!std::isnan(ap)) {
          cls_sum += ap;
          ++cls_n;
        }
      }
      ap_sum += cls_n > 0 ? cls_sum / cls_n : 0;
    }
    const Scalar ap_ref = ap_sum / Scalar(cfg.iou_thresholds.size());
    const EvalReport report = evaluate_detections(dets, gts, cfg);
    if (std::abs(report.ap - ap_ref) > 1e-9) ++failures;

    // AR reference for each configured k.
    if (!gts.empty()) {
      for (int k : cfg.ar_limits) {
        std::map<int, std::vector<Detection>> per_image;
        for (const auto& d : dets) per_image[d.image_id].push_back(d);
        std::vector<Detection> kept;
        for (auto& [img, group] : per_image) {
          const auto order = score_ranking(group);
          for (std::size_t i = 0; i < order.size() && i < std::size_t(k); ++i)
            kept.push_back(group[order[i]]);
        }
        const auto order = score_ranking(kept);
        Scalar ar_ref = 0;
        for (Scalar t : cfg.iou_thresholds) {
          const auto tp = oracle::brute_match(kept, order, gts, t, true);
          int hits = 0;
          for (char f : tp) hits += f;
          ar_ref += Scalar(hits) / Scalar(gts.size());
        }
        ar_ref /= Scalar(cfg.iou_thresholds.size());
        if (std::abs(average_recall(dets, gts, k, cfg) - ar_ref) > 1e-9)
          ++failures;
      }
    }
  }
  return {failures == 0,
          "200 scenes, AP + AR@{1,3,10}, " + std::to_string(failures) +
              " mismatches (tol 1e-9)"};
}

// ---- criterion 4: analytic gradients match finite differences -----------

Outcome gradient_check() {
  Rng rng(0xACCE5504);
  Scalar worst = 0;
  int instances = 0;
  while (instances < 100) {
    const int classes = 3, dim = 8;
    HeadParams params = HeadParams::random_init(classes, dim, rng, 0.3);
    std::vector<GroundTruth> gts;
    const int n_gts = static_cast<int>(rng.uniform_int(1, 2));
    for (int k = 0; k < n_gts; ++k) {
      const Scalar cx = rng.uniform(15, 45), cy = rng.uniform(15, 45);
      const Scalar w = rng.uniform(8, 14), h = rng.uniform(8, 14);
      gts.push_back(GroundTruth{
          k, Box{cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2},
          static_cast<int>(rng.uniform_int(0, classes - 1))});
    }
    std::vector<Candidate> cands;
    std::vector<VectorX> feats;
    const int n_cands = static_cast<int>(rng.uniform_int(4, 10));
    for (int j = 0; j < n_cands; ++j) {
      Candidate c;
      c.id = j;
      const GroundTruth& gt =
          gts[static_cast<std::size_t>(rng.uniform_int(0, n_gts - 1))];
      const Scalar jx = rng.uniform(-6, 6), jy = rng.uniform(-6, 6);
      c.prior = Box{gt.box.x1 + jx, gt.box.y1 + jy, gt.box.x2 + jx,
                    gt.box.y2 + jy};
      VectorX f(dim);
      for (int i = 0; i < dim; ++i) f[i] = rng.normal();
      feats.push_back(f);
      cands.push_back(std::move(c));
    }
    for (std::size_t j = 0; j < cands.size(); ++j) {
      const HeadOutput out = forward(params, feats[j], cands[j].prior);
      cands[j].class_scores = out.class_scores;
      cands[j].box = out.box;
      cands[j].iou_pred = out.iou_pred;
    }
    AssignmentConfig acfg;
    acfg.band_low = 0.3;
    acfg.band_high = 0.5;
    acfg.alpha = rng.uniform(0, 2);
    Grouping grouping = match_candidates(cands, gts, acfg);
    AssignmentResult assignment = mutual_label(grouping, cands, gts, acfg);
    ignored_weights(assignment, grouping, cands, acfg);
    if (assignment.pos_loc.empty() || assignment.pos_cls.empty()) continue;

    LossConfig cfg;
    cfg.gamma = 1.0;
    cfg.loc_loss = instances % 2 == 0 ? LossConfig::LocLossKind::SmoothL1
                                      : LossConfig::LocLossKind::Iou;
    const LossBreakdown bd =
        mlc_total(cands, feats, gts, assignment, params, cfg);

    const Scalar h = 1e-5;
    HeadParams p = params;
    for (int i = 0; i < p.param_count(); ++i) {
      const Scalar saved = p.get_param(i);
      p.set_param(i, saved + h);
      const Scalar up =
          mlc_total(cands, feats, gts, assignment, p, cfg).total;
      p.set_param(i, saved - h);
      const Scalar down =
          mlc_total(cands, feats, gts, assignment, p, cfg).total;
      p.set_param(i, saved);
      const Scalar fd = (up - down) / (2 * h);
      const Scalar an = bd.grads.get_param(i);
      const Scalar rel =
          std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1e-4});
      worst = std::max(worst, rel);
    }
    ++instances;
  }
  return {worst < 1e-4,
          "100 instances, worst relative error " + fmt(worst) + " (< 1e-4)"};
}

// ---- criterion 5: assignment invariants ---------------------------------

Outcome assignment_invariants() {
  Rng rng(0xACCE5505);
  int failures = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int classes = 3;
    std::vector<GroundTruth> gts;
    const int n_gts = static_cast<int>(rng.uniform_int(1, 3));
    for (int k = 0; k < n_gts; ++k) {
      const Scalar cx = rng.uniform(10, 50), cy = rng.uniform(10, 50);
      const Scalar w = rng.uniform(8, 16), h = rng.uniform(8, 16);
      gts.push_back(GroundTruth{
          k, Box{cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2},
          static_cast<int>(rng.uniform_int(0, classes - 1))});
    }
    std::vector<Candidate> cands;
    const int n_cands = static_cast<int>(rng.uniform_int(2, 24));
    for (int j = 0; j < n_cands; ++j) {
      Candidate c;
      c.id = j;
      const GroundTruth& gt =
          gts[static_cast<std::size_t>(rng.uniform_int(0, n_gts - 1))];
      const Scalar jx = rng.uniform(-8, 8), jy = rng.uniform(-8, 8);
      c.prior = Box{gt.box.x1 + jx, gt.box.y1 + jy, gt.box.x2 + jx,
                    gt.box.y2 + jy};
      VectorX scores(classes);
      for (int i = 0; i < classes; ++i) scores[i] = rng.uniform();
      c.class_scores = scores;
      const Scalar bx = rng.uniform(-4, 4), by = rng.uniform(-4, 4);
      c.box = Box{c.prior.x1 + bx, c.prior.y1 + by, c.prior.x2 + bx,
                  c.prior.y2 + by};
      cands.push_back(std::move(c));
    }
    AssignmentConfig cfg;
    cfg.band_low = 0.3;
    cfg.band_high = 0.55;
    cfg.alpha = rng.uniform(0, 3);

    const Grouping grouping = match_candidates(cands, gts, cfg);
    AssignmentResult r = mutual_label(grouping, cands, gts, cfg);
    ignored_weights(r, grouping, cands, cfg);

    bool ok = true;

    // Partition invariants.
    std::set<int> matched;
    for (const auto& [id, members] : grouping.members)
      matched.insert(members.begin(), members.end());
    std::set<int> pos(r.pos_cls.begin(), r.pos_cls.end());
    std::set<int> neg(r.neg_cls.begin(), r.neg_cls.end());
    ok = ok && pos.size() + neg.size() == matched.size();
    for (int j : pos) ok = ok && neg.count(j) == 0;
    std::set<int> uni = pos;
    uni.insert(neg.begin(), neg.end());
    ok = ok && uni == matched;
    for (int j : r.background) ok = ok && matched.count(j) == 0;

    // Rescue rule: every object with members has a positive in both sets.
    for (const auto& [id, members] : grouping.members) {
      if (members.empty()) continue;
      bool any_cls = false, any_loc = false;
      for (int j : members) {
        any_cls = any_cls || pos.count(j) > 0;
        any_loc = any_loc ||
                  std::binary_search(r.pos_loc.begin(), r.pos_loc.end(), j);
      }
      ok = ok && any_cls && any_loc;
    }

    // Weights in range, core positives exactly 1.
    for (std::size_t j = 0; j < cands.size(); ++j) {
      ok = ok && r.w_cls[j] >= 0 && r.w_cls[j] <= 1;
      ok = ok && r.w_loc[j] >= 0 && r.w_loc[j] <= 1;
      if (cands[j].origin == Origin::CorePositive)
        ok = ok && r.w_cls[j] == 1 && r.w_loc[j] == 1;
    }

    // Crossing + monotone invariance per object group.
    for (const auto& [id, members] : grouping.members) {
      if (members.empty()) continue;
      const GroundTruth* gt = nullptr;
      for (const auto& g : gts)
        if (g.id == id) gt = &g;
      std::vector<Scalar> ious, scores;
      for (int j : members) {
        ious.push_back(iou(cands[j].box, gt->box));
        scores.push_back(cands[j].class_scores[gt->label]);
      }
      const ObjectLabels base = mutual_label_object(ious, scores);

      std::vector<Scalar> shuffled = scores;
      for (std::size_t i = shuffled.size(); i > 1; --i)
        std::swap(shuffled[i - 1],
                  shuffled[static_cast<std::size_t>(rng.uniform_int(0, i - 1))]);
      const ObjectLabels perm = mutual_label_object(ious, shuffled);
      ok = ok && base.pos_cls == perm.pos_cls && base.neg_cls == perm.neg_cls;

      const Scalar a = rng.uniform(0.05, 0.9);
      const Scalar b = rng.uniform(0, Scalar(1) - a);
      std::vector<Scalar> mapped_s(scores.size()), mapped_i(ious.size());
      for (std::size_t i = 0; i < scores.size(); ++i)
        mapped_s[i] = a * scores[i] + b;
      for (std::size_t i = 0; i < ious.size(); ++i)
        mapped_i[i] = a * ious[i] + b;
      const ObjectLabels ms = mutual_label_object(ious, mapped_s);
      const ObjectLabels mi = mutual_label_object(mapped_i, scores);
      ok = ok && ms.pos_loc == base.pos_loc;
      ok = ok && mi.pos_cls == base.pos_cls && mi.neg_cls == base.neg_cls;
    }

    if (!ok) ++failures;
  }
  return {failures == 0,
          "1000 groups, " + std::to_string(failures) + " violations"};
}

// ---- criterion 6: divergence metric equals direct Spearman --------------

Outcome divergence_oracle() {
  Rng rng(0xACCE5506);
  int failures = 0;
  Scalar worst = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const int n = static_cast<int>(rng.uniform_int(2, 50));
    std::vector<Scalar> x(n), y(n);
    std::vector<std::pair<Scalar, Scalar>> pairs(n);
    const bool ties = trial % 2 == 0;
    for (int i = 0; i < n; ++i) {
      x[i] = ties ? std::round(rng.uniform() * 5) / 5 : rng.uniform();
      y[i] = ties ? std::round(rng.uniform() * 5) / 5 : rng.uniform();
      pairs[i] = {x[i], y[i]};
    }
    const SpearmanResult mine = divergence_metric(pairs);
    const oracle::BruteSpearman ref = oracle::brute_spearman(x, y);
    if (mine.degenerate != ref.degenerate) ++failures;
    worst = std::max(worst, std::abs(mine.value - ref.value));
  }
  // Degenerate constant inputs return the flagged zero.
  const SpearmanResult flat = divergence_metric(
      std::vector<std::pair<Scalar, Scalar>>{{0.5, 0.1}, {0.5, 0.7}});
  const bool flat_ok = flat.degenerate && flat.value == 0;
  return {failures == 0 && worst < 1e-12 && flat_ok,
          "500 sets, worst |diff| " + fmt(worst) + " (< 1e-12), degenerate " +
              (flat_ok ? "flagged" : "NOT flagged")};
}

// ---- criteria 7-11: the benchmark grid ----------------------------------

struct BenchmarkOutcomes {
  Outcome table1, table2, table3, table4, determinism;
};

bool check_named(const BenchmarkReport& report, const std::string& name) {
  for (const auto& c : report.checks)
    if (c.name == name) return c.pass;
  return false;
}

Scalar check_value(const BenchmarkReport& report, const std::string& name) {
  for (const auto& c : report.checks)
    if (c.name == name) return c.value;
  return std::numeric_limits<Scalar>::quiet_NaN();
}

BenchmarkOutcomes benchmark_criteria() {
  const auto start = Clock::now();
  const BenchmarkConfig cfg = io::default_config();
  const BenchmarkReport report = run_benchmark(cfg);
  const double elapsed = seconds_since(start);

  BenchmarkOutcomes out;

  const auto& base = report.cell(false, false);
  const auto& ml = report.cell(true, false);
  const bool t1 = check_named(report, "ml_raises_divergence") &&
                  check_named(report, "ml_raises_ap") && elapsed < 300.0;
  out.table1 = {t1, "divergence " + fmt(base.divergence) + " -> " +
                        fmt(ml.divergence) + " (gain >= 0.05), AP " +
                        fmt(base.ap) + " -> " + fmt(ml.ap) + ", " +
                        fmt(elapsed) + "s (< 300s)"};

  const bool t2 = check_named(report, "rescored_beats_standard") &&
                  check_named(report, "noisy_iou_nms_below_rescored");
  out.table2 = {t2, "AP standard " + fmt(report.nms.ap_standard) +
                        " < rescored " + fmt(report.nms.ap_rescored) +
                        "; noised: iou-nms " + fmt(report.nms.ap_iou_nms_noised) +
                        " < rescored " + fmt(report.nms.ap_rescored_noised)};

  const auto& both = report.cell(true, true);
  const auto& iur = report.cell(false, true);
  out.table3 = {check_named(report, "ml_iur_best_of_grid"),
                "grid AP " + fmt(base.ap) + "/" + fmt(ml.ap) + "/" +
                    fmt(iur.ap) + "/" + fmt(both.ap) +
                    " (ml+iur is the maximum)"};

  bool t4 = true;
  std::string ar_detail = "AR gains:";
  for (const auto& [k, v] : ml.ar_at_k) {
    const std::string name = "ml_raises_ar_at_" + std::to_string(k);
    t4 = t4 && check_named(report, name);
    ar_detail += " @" + std::to_string(k) + " " + fmt(check_value(report, name));
  }
  out.table4 = {t4, ar_detail};

  const std::string json1 = io::benchmark_report_json(report);
  const BenchmarkReport report2 = run_benchmark(cfg);
  const std::string json2 = io::benchmark_report_json(report2);
  out.determinism = {json1 == json2,
                     json1 == json2 ? "two runs byte-identical ("
                                          + std::to_string(json1.size()) +
                                          " bytes)"
                                    : "reports differ"};
  return out;
}

}  // namespace

int main() {
  struct Entry {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };

  std::vector<std::pair<int, Outcome>> results;
  const auto report_line = [&](int id, const char* name, const Outcome& o,
                               double secs) {
    std::printf("%s  %2d %-36s %s  [%.2fs]\n", o.pass ? "PASS" : "FAIL", id,
                name, o.detail.c_str(), secs);
    std::fflush(stdout);
    results.emplace_back(id, o);
  };

  const std::vector<Entry> entries{
      {1, "otsu-brute-force-equivalence", otsu_oracle},
      {2, "nms-brute-force-equivalence", nms_oracle},
      {3, "ap-ar-brute-force-equivalence", eval_oracle},
      {4, "gradient-finite-difference-check", gradient_check},
      {5, "assignment-invariants", assignment_invariants},
      {6, "divergence-metric-equivalence", divergence_oracle},
  };
  for (const auto& e : entries) {
    const auto start = Clock::now();
    const Outcome o = e.run();
    report_line(e.id, e.name, o, seconds_since(start));
  }

  const auto bench_start = Clock::now();
  const BenchmarkOutcomes bench = benchmark_criteria();
  const double bench_secs = seconds_since(bench_start);
  report_line(7, "table1-mutual-labeling-direction", bench.table1, bench_secs);
  report_line(8, "table2-iur-rescoring-direction", bench.table2, 0.0);
  report_line(9, "table3-grid-maximum", bench.table3, 0.0);
  report_line(10, "table4-proposal-recall-direction", bench.table4, 0.0);
  report_line(11, "benchmark-determinism", bench.determinism, 0.0);

  int failed = 0;
  for (const auto& [id, o] : results)
    if (!o.pass) ++failed;
  std::printf("%d/%zu criteria passed\n", static_cast<int>(results.size()) - failed,
              results.size());
  return failed;
}
