#include "actube/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace actube {

std::vector<double> EvalConfig::default_sweep() {
  std::vector<double> out;
  for (int i = 0; i < 10; ++i) out.push_back((10 + i) / 20.0);
  return out;
}

std::vector<double> EvalConfig::default_fractions() {
  std::vector<double> out;
  for (int i = 1; i <= 10; ++i) out.push_back(i / 10.0);
  return out;
}

void EvalConfig::validate() const {
  const auto in_range = [](double d) { return d > 0.0 && d <= 1.0; };
  if (!in_range(delta)) throw EvalError("eval.delta must be in (0,1]");
  if (!std::all_of(delta_sweep.begin(), delta_sweep.end(), in_range))
    throw EvalError("eval.delta_sweep entries must be in (0,1]");
  if (!std::all_of(fractions.begin(), fractions.end(), in_range))
    throw EvalError("eval.fractions entries must be in (0,1]");
}

double temporal_iou(int a_start, int a_end, int b_start, int b_end) {
  const int inter = std::min(a_end, b_end) - std::max(a_start, b_start) + 1;
  if (inter <= 0) return 0.0;
  const int uni = (a_end - a_start + 1) + (b_end - b_start + 1) - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double st_iou(const ActionTube& det, const GtTube& gt, SpatialAveraging averaging) {
  const double tiou = temporal_iou(det.start, det.end, gt.start, gt.end);
  if (tiou <= 0.0) return 0.0;
  const int from = std::max(det.start, gt.start);
  const int to = std::min(det.end, gt.end);
  double sum = 0.0;
  for (int t = from; t <= to; ++t) sum += iou(det.box_at(t), gt.box_at(t));
  const int frames = averaging == SpatialAveraging::intersection ? to - from + 1 : gt.end - gt.start + 1;
  return tiou * (sum / static_cast<double>(frames));
}

double class_ap(std::span<const ActionTube> dets, std::span<const GtTube> gts, double delta,
                SpatialAveraging averaging) {
  if (dets.empty() || gts.empty()) return 0.0;

  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (dets[a].score != dets[b].score) return dets[a].score > dets[b].score;
    return dets[a].video < dets[b].video;
  });

  std::vector<bool> claimed(gts.size(), false);
  std::vector<double> precision;
  std::vector<double> recall;
  int tp = 0;
  int fp = 0;
  for (std::size_t idx : order) {
    const auto& d = dets[idx];
    double best = -1.0;
    std::size_t best_g = 0;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (claimed[g] || gts[g].video != d.video || gts[g].cls != d.cls) continue;
      const double o = st_iou(d, gts[g], averaging);
      if (o > best) {
        best = o;
        best_g = g;
      }
    }
    if (best >= delta) {
      claimed[best_g] = true;
      ++tp;
    } else {
      ++fp;
    }
    precision.push_back(static_cast<double>(tp) / static_cast<double>(tp + fp));
    recall.push_back(static_cast<double>(tp) / static_cast<double>(gts.size()));
  }

  // Area under the monotone precision envelope.
  for (std::size_t k = precision.size(); k-- > 1;) precision[k - 1] = std::max(precision[k - 1], precision[k]);
  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t k = 0; k < precision.size(); ++k) {
    ap += (recall[k] - prev_recall) * precision[k];
    prev_recall = recall[k];
  }
  return ap;
}

MapResult video_map(std::span<const ActionTube> dets, std::span<const GtTube> gts, double delta,
                    SpatialAveraging averaging) {
  if (gts.empty()) throw EvalError("video_map: no ground-truth tubes");
  std::set<int> classes;
  for (const auto& g : gts) classes.insert(g.cls);

  MapResult res;
  for (int c : classes) {
    std::vector<ActionTube> class_dets;
    std::vector<GtTube> class_gts;
    for (const auto& d : dets)
      if (d.cls == c) class_dets.push_back(d);
    for (const auto& g : gts)
      if (g.cls == c) class_gts.push_back(g);
    res.per_class[c] = class_ap(class_dets, class_gts, delta, averaging);
  }
  double sum = 0.0;
  for (const auto& [c, ap] : res.per_class) sum += ap;
  res.mean = sum / static_cast<double>(res.per_class.size());
  return res;
}

double avg_map(std::span<const ActionTube> dets, std::span<const GtTube> gts, std::span<const double> sweep,
               SpatialAveraging averaging) {
  if (sweep.empty()) throw EvalError("avg_map: empty threshold sweep");
  double sum = 0.0;
  for (double d : sweep) sum += video_map(dets, gts, d, averaging).mean;
  return sum / static_cast<double>(sweep.size());
}

int observed_frames(double fraction, int length) {
  const int n = static_cast<int>(std::ceil(fraction * length - 1e-9));
  return std::clamp(n, 1, std::max(1, length));
}

MapResult completion_map(std::span<const ActionTube> completed, std::span<const GtTube> gts, double delta,
                         SpatialAveraging averaging) {
  return video_map(completed, gts, delta, averaging);
}

std::optional<ActionTube> after_frame(const ActionTube& tube, int boundary) {
  if (tube.end <= boundary) return std::nullopt;
  if (tube.start > boundary) return tube;
  ActionTube out = tube;
  const auto skip = static_cast<long>(boundary + 1 - tube.start);
  out.start = boundary + 1;
  out.boxes.erase(out.boxes.begin(), out.boxes.begin() + skip);
  if (static_cast<long>(out.box_scores.size()) >= skip)
    out.box_scores.erase(out.box_scores.begin(), out.box_scores.begin() + skip);
  return out;
}

std::optional<GtTube> after_frame(const GtTube& tube, int boundary) {
  if (tube.end <= boundary) return std::nullopt;
  if (tube.start > boundary) return tube;
  GtTube out = tube;
  out.start = boundary + 1;
  out.boxes.erase(out.boxes.begin(), out.boxes.begin() + (boundary + 1 - tube.start));
  return out;
}

MapResult prediction_map(std::span<const ActionTube> completed, std::span<const GtTube> gts,
                         const std::map<std::string, int>& last_observed, const std::map<std::string, int>& lengths,
                         double delta, SpatialAveraging averaging) {
  const auto boundary = [&](const std::string& video) -> std::optional<int> {
    const auto obs = last_observed.find(video);
    const auto len = lengths.find(video);
    if (obs == last_observed.end() || len == lengths.end()) return std::nullopt;
    if (obs->second >= len->second - 1) return std::nullopt;
    return obs->second;
  };

  std::vector<ActionTube> dets;
  for (const auto& d : completed) {
    if (const auto b = boundary(d.video))
      if (auto seg = after_frame(d, *b)) dets.push_back(std::move(*seg));
  }
  std::vector<GtTube> segs;
  for (const auto& g : gts) {
    if (const auto b = boundary(g.video))
      if (auto seg = after_frame(g, *b)) segs.push_back(std::move(*seg));
  }
  if (segs.empty()) throw EvalError("prediction_map: no ground truth after the observation boundary");
  return video_map(dets, segs, delta, averaging);
}

std::vector<double> early_accuracy(const std::map<std::string, std::vector<std::optional<int>>>& predicted,
                                   const std::map<std::string, int>& gt_labels, std::size_t num_fractions) {
  std::vector<double> acc(num_fractions, 0.0);
  if (gt_labels.empty()) return acc;
  for (std::size_t k = 0; k < num_fractions; ++k) {
    int correct = 0;
    for (const auto& [video, label] : gt_labels) {
      const auto it = predicted.find(video);
      if (it == predicted.end() || k >= it->second.size()) continue;
      const auto& p = it->second[k];
      if (p && *p == label) ++correct;
    }
    acc[k] = static_cast<double>(correct) / static_cast<double>(gt_labels.size());
  }
  return acc;
}

std::map<std::string, int> video_labels(std::span<const GtTube> gts) {
  std::map<std::string, std::map<int, int>> counts;
  for (const auto& g : gts) ++counts[g.video][g.cls];
  std::map<std::string, int> out;
  for (const auto& [video, per_class] : counts) {
    int best = 0;
    int best_count = -1;
    for (const auto& [c, n] : per_class) {
      if (n > best_count) {
        best = c;
        best_count = n;
      }
    }
    out[video] = best;
  }
  return out;
}

}  // namespace actube
