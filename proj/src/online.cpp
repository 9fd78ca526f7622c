#include "actube/online.hpp"

#include <algorithm>
#include <numeric>

namespace actube {

double OnlineParams::alpha_for(int cls) const {
  if (cls >= 0 && static_cast<std::size_t>(cls) < alpha.size()) return alpha[static_cast<std::size_t>(cls)];
  return default_alpha;
}

void OnlineParams::validate() const {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw LinkerError("online.lambda must be in [0,1]");
  if (n < 1) throw LinkerError("online.n must be >= 1");
  if (k_terminate < 1) throw LinkerError("online.k_terminate must be >= 1");
  if (m < 1) throw LinkerError("online.m must be >= 1");
  if (!(nms_threshold >= 0.0 && nms_threshold <= 1.0)) throw LinkerError("online.nms_threshold must be in [0,1]");
  if (!(default_alpha >= 0.0)) throw LinkerError("online.alpha must be >= 0");
  for (double a : alpha)
    if (!(a >= 0.0)) throw LinkerError("online.alpha must be >= 0");
  if (min_tube_length < 1) throw LinkerError("online.min_tube_length must be >= 1");
}

ActionTube LiveTube::as_tube(const std::string& video) const {
  ActionTube t;
  t.video = video;
  t.cls = cls;
  t.start = start;
  t.end = end();
  t.boxes = boxes;
  t.box_scores = frame_scores;
  t.score = mean_score();
  return t;
}

std::vector<ActionTube> LiveTube::trimmed(const std::string& video) const {
  std::vector<ActionTube> out;
  const auto labels = labeller.labels();
  for (const auto& [first, last] : positive_runs(labels)) {
    ActionTube t;
    t.video = video;
    t.cls = cls;
    t.start = start + first;
    t.end = start + last;
    double sum = 0.0;
    int count = 0;
    for (int r = first; r <= last; ++r) {
      const auto k = static_cast<std::size_t>(r);
      t.boxes.push_back(boxes[k]);
      t.box_scores.push_back(frame_scores[k]);
      if (observed[k]) {
        sum += frame_scores[k];
        ++count;
      }
    }
    if (count == 0) {
      sum = std::accumulate(t.box_scores.begin(), t.box_scores.end(), 0.0);
      count = static_cast<int>(t.box_scores.size());
    }
    t.score = sum / count;
    out.push_back(std::move(t));
  }
  return out;
}

OnlineLinker::OnlineLinker(int num_classes, OnlineParams params, std::string video)
    : num_classes_(num_classes), params_(std::move(params)), video_(std::move(video)) {
  if (num_classes < 1) throw LinkerError("OnlineLinker: need at least one class");
  params_.validate();
  active_.resize(static_cast<std::size_t>(num_classes));
  terminated_.resize(static_cast<std::size_t>(num_classes));
}

std::size_t OnlineLinker::index(int cls) const {
  if (cls < 1 || cls > num_classes_) throw LinkerError("class id out of range: " + std::to_string(cls));
  return static_cast<std::size_t>(cls - 1);
}

void OnlineLinker::step(const DetectionFrame& frame) {
  if (delta_ != 0) throw LinkerError("step: linker is in micro-tube mode");
  if (t_ >= 0 && frame.t <= t_)
    throw LinkerError("step: frame index " + std::to_string(frame.t) + " does not follow " + std::to_string(t_));
  if (frame.t < 0) throw LinkerError("step: negative frame index");

  for (int skipped = t_ + 1; t_ >= 0 && skipped < frame.t; ++skipped)
    for (int c = 1; c <= num_classes_; ++c) advance_class(c, skipped, 0, {});

  for (int c = 1; c <= num_classes_; ++c) {
    const auto selected =
        select_class_detections(frame.detections, c, params_.nms_threshold, params_.n, params_.min_score);
    std::vector<Candidate> cands;
    cands.reserve(selected.size());
    for (const auto& s : selected) cands.push_back({s.box, std::nullopt, s.score, nullptr});
    advance_class(c, frame.t, 0, std::move(cands));
  }
  t_ = frame.t;
}

void OnlineLinker::link_microtubes(int t, int delta, std::span<const MicroTube> microtubes) {
  if (delta < 1) throw LinkerError("link_microtubes: delta must be >= 1");
  if (t < 0) throw LinkerError("link_microtubes: negative frame index");
  if (t_ >= 0) {
    if (delta_ == 0) throw LinkerError("link_microtubes: linker is in frame mode");
    if (delta != delta_) throw LinkerError("link_microtubes: stride changed from " + std::to_string(delta_));
    if (t <= t_ || (t - t_) % delta != 0)
      throw LinkerError("link_microtubes: frame " + std::to_string(t) + " is not on the stride after " +
                        std::to_string(t_));
    for (int skipped = t_ + delta; skipped < t; skipped += delta)
      for (int c = 1; c <= num_classes_; ++c) advance_class(c, skipped, delta, {});
  }
  delta_ = delta;

  std::vector<ScoredBox> firsts;
  firsts.reserve(microtubes.size());
  for (const auto& mt : microtubes) firsts.push_back({mt.b1, mt.scores});

  for (int c = 1; c <= num_classes_; ++c) {
    const auto selected = select_class_detections(firsts, c, params_.nms_threshold, params_.n, params_.min_score);
    std::vector<Candidate> cands;
    cands.reserve(selected.size());
    for (const auto& s : selected) {
      const auto& mt = microtubes[static_cast<std::size_t>(s.source)];
      cands.push_back({mt.b1, mt.b2, s.score, &mt});
    }
    advance_class(c, t, delta, std::move(cands));
  }
  t_ = t;
}

void OnlineLinker::advance_class(int cls, int t, int delta, std::vector<Candidate> candidates) {
  auto& tubes = active_[index(cls)];
  std::stable_sort(tubes.begin(), tubes.end(),
                   [](const LiveTube& a, const LiveTube& b) { return a.mean_score() > b.mean_score(); });

  std::vector<bool> claimed(candidates.size(), false);
  std::vector<LiveTube> survivors;
  survivors.reserve(tubes.size() + candidates.size());
  for (auto& tube : tubes) {
    int best = -1;
    double best_overlap = 0.0;
    for (std::size_t j = 0; j < candidates.size(); ++j) {
      if (claimed[j]) continue;
      const double o = iou(tube.last_box(), candidates[j].first);
      if (!(o > params_.lambda)) continue;
      const auto& cur = candidates[j];
      if (best < 0 || cur.score > candidates[static_cast<std::size_t>(best)].score ||
          (cur.score == candidates[static_cast<std::size_t>(best)].score && o > best_overlap)) {
        best = static_cast<int>(j);
        best_overlap = o;
      }
    }
    if (best >= 0) {
      claimed[static_cast<std::size_t>(best)] = true;
      attach(tube, t, delta, candidates[static_cast<std::size_t>(best)]);
      survivors.push_back(std::move(tube));
    } else if ((tube.misses = t + delta - tube.end()) > params_.k_terminate) {
      retire(cls, std::move(tube));
    } else {
      survivors.push_back(std::move(tube));
    }
  }
  for (std::size_t j = 0; j < candidates.size(); ++j)
    if (!claimed[j]) survivors.push_back(spawn(cls, t, delta, candidates[j]));

  const auto cap = static_cast<std::size_t>(4 * params_.n);
  if (survivors.size() > cap) {
    std::stable_sort(survivors.begin(), survivors.end(),
                     [](const LiveTube& a, const LiveTube& b) { return a.mean_score() > b.mean_score(); });
    while (survivors.size() > cap) {
      retire(cls, std::move(survivors.back()));
      survivors.pop_back();
    }
  }
  std::sort(survivors.begin(), survivors.end(), [](const LiveTube& a, const LiveTube& b) { return a.id < b.id; });
  tubes = std::move(survivors);
}

void OnlineLinker::attach(LiveTube& tube, int t, int delta, const Candidate& cand) const {
  const auto push = [&tube](const Box& b, double score, bool observed) {
    tube.boxes.push_back(b);
    tube.frame_scores.push_back(score);
    tube.observed.push_back(observed);
    tube.labeller.push(score);
  };

  if (delta > 0 && tube.end() == t) {
    // Shared frame: the newer micro-tube's first box wins.
    tube.boxes.back() = cand.first;
    tube.observed.back() = true;
  } else {
    const int gap = t - tube.end() - 1;
    if (gap > 0) {
      const auto bridge = interpolate_pair(tube.last_box(), cand.first, gap + 1);
      const double s0 = tube.frame_scores.back();
      for (int k = 1; k <= gap; ++k) {
        const double w = static_cast<double>(k) / static_cast<double>(gap + 1);
        push(bridge[static_cast<std::size_t>(k)], s0 + (cand.score - s0) * w, false);
      }
    }
    push(cand.first, cand.score, true);
  }
  if (delta > 0 && cand.second) {
    const auto span = interpolate_pair(cand.first, *cand.second, delta);
    for (int k = 1; k <= delta; ++k) push(span[static_cast<std::size_t>(k)], cand.score, k == delta);
  }
  if (cand.source && cand.source->pred) tube.predictions.push_back(*cand.source->pred);
  tube.score_sum += cand.score;
  ++tube.members;
  tube.misses = 0;
}

LiveTube OnlineLinker::spawn(int cls, int t, int delta, const Candidate& cand) {
  LiveTube tube;
  tube.id = next_id_++;
  tube.cls = cls;
  tube.start = t;
  tube.labeller = OnlineLabeller({params_.label_weight, params_.alpha_for(cls)}, params_.m);
  tube.boxes.push_back(cand.first);
  tube.frame_scores.push_back(cand.score);
  tube.observed.push_back(true);
  tube.labeller.push(cand.score);
  if (delta > 0 && cand.second) {
    const auto span = interpolate_pair(cand.first, *cand.second, delta);
    for (int k = 1; k <= delta; ++k) {
      tube.boxes.push_back(span[static_cast<std::size_t>(k)]);
      tube.frame_scores.push_back(cand.score);
      tube.observed.push_back(k == delta);
      tube.labeller.push(cand.score);
    }
  }
  if (cand.source && cand.source->pred) tube.predictions.push_back(*cand.source->pred);
  tube.score_sum = cand.score;
  tube.members = 1;
  return tube;
}

void OnlineLinker::retire(int cls, LiveTube tube) {
  if (tube.length() < params_.min_tube_length) return;
  terminated_[index(cls)].push_back(std::move(tube));
}

std::optional<int> OnlineLinker::predict_label() const {
  std::optional<int> label;
  double best = 0.0;
  for (int c = 1; c <= num_classes_; ++c) {
    for (const auto* list : {&active_[index(c)], &terminated_[index(c)]}) {
      for (const auto& tube : *list) {
        if (!label || tube.mean_score() > best) {
          best = tube.mean_score();
          label = c;
        }
      }
    }
  }
  return label;
}

std::vector<ActionTube> OnlineLinker::finish() {
  std::vector<ActionTube> out;
  for (int c = 1; c <= num_classes_; ++c) {
    auto& live = active_[index(c)];
    for (auto& tube : live) retire(c, std::move(tube));
    live.clear();
    auto& done = terminated_[index(c)];
    std::sort(done.begin(), done.end(), [](const LiveTube& a, const LiveTube& b) { return a.id < b.id; });
    for (const auto& tube : done)
      for (auto& trimmed : tube.trimmed(video_)) out.push_back(std::move(trimmed));
  }
  return out;
}

}  // namespace actube
