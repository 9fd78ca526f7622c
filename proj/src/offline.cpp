#include "actube/offline.hpp"

#include <algorithm>
#include <numeric>

namespace actube {

void PathParams::validate() const {
  if (!(lambda_o >= 0.0)) throw OfflineError("path.lambda_o must be >= 0");
  if (max_paths < 1) throw OfflineError("path.max_paths must be >= 1");
}

double TrimParams::alpha_for(int cls) const {
  if (cls >= 0 && static_cast<std::size_t>(cls) < alpha.size()) return alpha[static_cast<std::size_t>(cls)];
  return default_alpha;
}

void TrimParams::validate() const {
  if (!(default_alpha >= 0.0)) throw OfflineError("trim.alpha must be >= 0");
  for (double a : alpha)
    if (!(a >= 0.0)) throw OfflineError("trim.alpha must be >= 0");
  if (!(lambda_l >= 0.0)) throw OfflineError("trim.lambda_l must be >= 0");
  if (top_k < 1) throw OfflineError("trim.top_k must be >= 1");
}

std::size_t ActionPath::ghost_count() const {
  return static_cast<std::size_t>(std::count(detection.begin(), detection.end(), -1));
}

namespace {

struct State {
  Box box;
  double unary = 0.0;
  int det = -1;
  int back = -1;
  double value = 0.0;
};

bool is_available(const std::vector<std::vector<bool>>& available, std::size_t t, std::size_t j) {
  return available.empty() || available[t][j];
}

}  // namespace

bool best_path(const ClassFrames& frames, const std::vector<std::vector<bool>>& available, double lambda_o,
               ActionPath& out) {
  const std::size_t T = frames.size();
  std::vector<std::vector<State>> trellis(T);

  std::size_t first = T;
  for (std::size_t t = 0; t < T && first == T; ++t) {
    for (std::size_t j = 0; j < frames[t].size(); ++j) {
      if (is_available(available, t, j)) {
        first = t;
        break;
      }
    }
  }
  if (first == T) return false;

  // Leading ghosts copy the first real box: `first` pairwise terms of 1.
  const double lead = lambda_o * static_cast<double>(first);
  for (std::size_t j = 0; j < frames[first].size(); ++j) {
    if (!is_available(available, first, j)) continue;
    const auto& d = frames[first][j];
    trellis[first].push_back({d.box, d.score, static_cast<int>(j), -1, d.score + lead});
  }

  for (std::size_t t = first + 1; t < T; ++t) {
    const auto& prev = trellis[t - 1];
    auto& cur = trellis[t];
    for (std::size_t j = 0; j < frames[t].size(); ++j) {
      if (!is_available(available, t, j)) continue;
      const auto& d = frames[t][j];
      double best = 0.0;
      int arg = -1;
      for (std::size_t i = 0; i < prev.size(); ++i) {
        const double v = prev[i].value + lambda_o * iou(prev[i].box, d.box);
        if (arg < 0 || v > best) {
          best = v;
          arg = static_cast<int>(i);
        }
      }
      cur.push_back({d.box, d.score, static_cast<int>(j), arg, best + d.score});
    }
    if (cur.empty()) {
      for (std::size_t i = 0; i < prev.size(); ++i)
        cur.push_back({prev[i].box, 0.0, -1, static_cast<int>(i), prev[i].value + lambda_o});
    }
  }

  const auto& last = trellis[T - 1];
  int k = 0;
  for (int i = 1; i < static_cast<int>(last.size()); ++i)
    if (last[static_cast<std::size_t>(i)].value > last[static_cast<std::size_t>(k)].value) k = i;

  out.boxes.assign(T, Box{});
  out.unary.assign(T, 0.0);
  out.detection.assign(T, -1);
  out.energy = last[static_cast<std::size_t>(k)].value;
  for (std::size_t t = T; t-- > first;) {
    const auto& s = trellis[t][static_cast<std::size_t>(k)];
    out.boxes[t] = s.box;
    out.unary[t] = s.unary;
    out.detection[t] = s.det;
    k = s.back;
  }
  for (std::size_t t = 0; t < first; ++t) out.boxes[t] = out.boxes[first];
  return true;
}

std::vector<ActionPath> build_paths(const ClassFrames& frames, int cls, const PathParams& params) {
  params.validate();
  const std::size_t T = frames.size();
  if (T == 0) throw OfflineError("build_paths: empty video");

  std::vector<std::vector<bool>> available(T);
  std::vector<std::size_t> remaining(T);
  for (std::size_t t = 0; t < T; ++t) {
    available[t].assign(frames[t].size(), true);
    remaining[t] = frames[t].size();
  }

  std::vector<ActionPath> paths;
  while (static_cast<int>(paths.size()) < params.max_paths) {
    const auto empty = static_cast<std::size_t>(std::count(remaining.begin(), remaining.end(), 0u));
    if (!paths.empty() && 2 * empty > T) break;

    ActionPath path;
    if (!best_path(frames, available, params.lambda_o, path)) break;
    path.cls = cls;
    const double mean = std::accumulate(path.unary.begin(), path.unary.end(), 0.0) / static_cast<double>(T);
    if (mean < params.min_mean_score) break;

    for (std::size_t t = 0; t < T; ++t) {
      const int j = path.detection[t];
      if (j < 0) continue;
      available[t][static_cast<std::size_t>(j)] = false;
      --remaining[t];
    }
    paths.push_back(std::move(path));
  }
  std::stable_sort(paths.begin(), paths.end(),
                   [](const ActionPath& a, const ActionPath& b) { return a.energy > b.energy; });
  return paths;
}

std::vector<ActionTube> viterbi_trim(const ActionPath& path, const TrimParams& params) {
  params.validate();
  const auto labels = potts_labelling(path.unary, {params.lambda_l, params.alpha_for(path.cls)});
  std::vector<ActionTube> tubes;
  for (const auto& [first, last] : positive_runs(labels)) {
    ActionTube tube;
    tube.cls = path.cls;
    tube.start = first;
    tube.end = last;
    tube.boxes.assign(path.boxes.begin() + first, path.boxes.begin() + last + 1);
    tube.box_scores.assign(path.unary.begin() + first, path.unary.begin() + last + 1);
    tube.score = top_k_mean(tube.box_scores, params.top_k);
    tubes.push_back(std::move(tube));
  }
  return tubes;
}

std::vector<TemporalProposal> temporal_detect(const std::vector<std::vector<double>>& frame_scores,
                                              std::span<const int> classes, double lambda, double alpha) {
  if (frame_scores.empty()) throw OfflineError("temporal_detect: no frames");
  if (classes.empty()) throw OfflineError("temporal_detect: no candidate classes");
  std::vector<TemporalProposal> out;
  std::vector<double> seq(frame_scores.size());
  for (int c : classes) {
    for (std::size_t t = 0; t < frame_scores.size(); ++t) seq[t] = frame_scores[t].at(static_cast<std::size_t>(c));
    const auto labels = potts_labelling(seq, {lambda, alpha});
    for (const auto& [first, last] : positive_runs(labels)) {
      double sum = 0.0;
      for (int t = first; t <= last; ++t) sum += seq[static_cast<std::size_t>(t)];
      out.push_back({c, first, last, sum / static_cast<double>(last - first + 1)});
    }
  }
  return out;
}

std::vector<ActionTube> build_offline_tubes(std::span<const DetectionFrame> frames, int num_classes,
                                            const OfflineParams& params) {
  std::vector<ActionTube> out;
  if (frames.empty()) return out;
  const int t0 = frames.front().t;
  const auto span = static_cast<std::size_t>(frames.back().t - t0 + 1);
  for (int c = 1; c <= num_classes; ++c) {
    // Frames missing from the stream stay empty.
    ClassFrames class_frames(span);
    for (const auto& f : frames)
      class_frames[static_cast<std::size_t>(f.t - t0)] =
          select_class_detections(f.detections, c, params.nms_threshold, params.top_n, params.min_score);
    for (const auto& path : build_paths(class_frames, c, params.path)) {
      for (auto& tube : viterbi_trim(path, params.trim)) {
        tube.video = frames.front().video;
        tube.start += t0;
        tube.end += t0;
        out.push_back(std::move(tube));
      }
    }
  }
  return out;
}

}  // namespace actube
