#include "actube/future.hpp"

#include <algorithm>
#include <map>
#include <string>

namespace actube {

void HorizonParams::validate() const {
  if (velocity_window < 1) throw PredictionError("horizon.velocity_window must be >= 1");
  if (!(width > 0.0 && height > 0.0)) throw PredictionError("horizon image size must be > 0");
}

std::vector<Box> extrapolate(std::span<const Box> tail, int horizon, const HorizonParams& params) {
  std::vector<Box> out;
  if (horizon <= 0) return out;
  if (tail.empty()) throw PredictionError("extrapolate: empty tail");
  out.reserve(static_cast<std::size_t>(horizon));
  const Box& last = tail.back();
  if (tail.size() < 2) {
    out.assign(static_cast<std::size_t>(horizon), clamp(last, params.width, params.height));
    return out;
  }
  const auto steps = std::min<std::size_t>(static_cast<std::size_t>(params.velocity_window), tail.size() - 1);
  const Box& from = tail[tail.size() - 1 - steps];
  const double n = static_cast<double>(steps);
  const double vx1 = (last.x_min - from.x_min) / n;
  const double vy1 = (last.y_min - from.y_min) / n;
  const double vx2 = (last.x_max - from.x_max) / n;
  const double vy2 = (last.y_max - from.y_max) / n;
  const auto ordered = [](double& lo, double& hi) {
    if (hi < lo) lo = hi = 0.5 * (lo + hi);
  };
  for (int h = 1; h <= horizon; ++h) {
    Box b{last.x_min + h * vx1, last.y_min + h * vy1, last.x_max + h * vx2, last.y_max + h * vy2};
    ordered(b.x_min, b.x_max);
    ordered(b.y_min, b.y_max);
    out.push_back(clamp(b, params.width, params.height));
  }
  return out;
}

std::vector<Box> assemble_future(const ActionTube& tube, std::span<const PredictionSet> predictions, int t_now,
                                 const HorizonParams& params) {
  params.validate();
  if (tube.boxes.empty()) throw PredictionError("assemble_future: empty tube");
  if (t_now < tube.start) throw PredictionError("assemble_future: t_now precedes the tube");
  const int first = tube.end + 1;
  const int last = params.video_length - 1;
  std::vector<Box> out;
  if (first > last) return out;

  // Key frame -> (anchor, lookahead, box); keeps the highest-precedence source.
  struct Source {
    int anchor;
    int lookahead;
    Box box;
  };
  std::map<int, Source> keys;
  for (const auto& p : predictions) {
    if (p.anchor_t > t_now) continue;
    for (int k = 1; k <= p.n_future(); ++k) {
      const int f = p.future_frame(k);
      if (f < first || f > last) continue;
      const Source s{p.anchor_t, k, p.future[static_cast<std::size_t>(k - 1)]};
      auto it = keys.find(f);
      if (it == keys.end()) {
        keys.emplace(f, s);
      } else if (s.anchor > it->second.anchor ||
                 (s.anchor == it->second.anchor && s.lookahead < it->second.lookahead)) {
        it->second = s;
      }
    }
  }

  // Detected tube followed by the assembled frames; used as extrapolation tail.
  std::vector<Box> track(tube.boxes.begin(), tube.boxes.end());
  int track_end = tube.end;
  for (const auto& [f, src] : keys) {
    const auto bridge = interpolate_pair(track.back(), src.box, f - track_end);
    track.insert(track.end(), bridge.begin() + 1, bridge.end());
    track_end = f;
  }
  const auto keep = static_cast<std::size_t>(params.velocity_window) + 1;
  const auto tail_begin = track.size() > keep ? track.end() - static_cast<long>(keep) : track.begin();
  const std::vector<Box> tail(tail_begin, track.end());
  const auto extra = extrapolate(tail, last - track_end, params);

  const auto assembled = track.size() - tube.boxes.size();
  out.reserve(static_cast<std::size_t>(last - first + 1));
  for (std::size_t k = 0; k < assembled; ++k)
    out.push_back(clamp(track[tube.boxes.size() + k], params.width, params.height));
  out.insert(out.end(), extra.begin(), extra.end());
  return out;
}

ActionTube complete_tube(const ActionTube& detected, int future_start, std::span<const Box> future) {
  if (!detected.contiguous()) throw PredictionError("complete_tube: detected part is not contiguous");
  if (!future.empty() && future_start != detected.end + 1)
    throw PredictionError("complete_tube: future starts at " + std::to_string(future_start) + ", expected " +
                          std::to_string(detected.end + 1));
  ActionTube out = detected;
  out.boxes.insert(out.boxes.end(), future.begin(), future.end());
  out.box_scores.insert(out.box_scores.end(), future.size(), detected.score);
  out.end = detected.end + static_cast<int>(future.size());
  return out;
}

}  // namespace actube
