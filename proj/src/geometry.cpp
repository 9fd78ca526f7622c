#include "actube/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace actube {

bool Box::valid() const {
  return std::isfinite(x_min) && std::isfinite(y_min) && std::isfinite(x_max) &&
         std::isfinite(y_max) && x_min <= x_max && y_min <= y_max;
}

double iou(const Box& a, const Box& b) {
  const double iw = std::max(0.0, std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min));
  const double ih = std::max(0.0, std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min));
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

std::vector<Box> interpolate_pair(const Box& first, const Box& last, int delta) {
  if (delta < 1) throw GeometryError("interpolate_pair: delta must be >= 1");
  std::vector<Box> out;
  out.reserve(static_cast<std::size_t>(delta) + 1);
  out.push_back(first);
  const auto lerp = [delta](double a, double b, int k) {
    return a + (b - a) * static_cast<double>(k) / static_cast<double>(delta);
  };
  for (int k = 1; k < delta; ++k) {
    out.push_back({lerp(first.x_min, last.x_min, k), lerp(first.y_min, last.y_min, k),
                   lerp(first.x_max, last.x_max, k), lerp(first.y_max, last.y_max, k)});
  }
  out.push_back(last);
  return out;
}

Box clamp(const Box& b, double width, double height) {
  return {std::clamp(b.x_min, 0.0, width), std::clamp(b.y_min, 0.0, height),
          std::clamp(b.x_max, 0.0, width), std::clamp(b.y_max, 0.0, height)};
}

std::vector<std::size_t> nms_per_class(std::span<const Box> boxes, std::span<const double> scores,
                                       double threshold) {
  if (boxes.size() != scores.size()) throw GeometryError("nms_per_class: size mismatch");
  std::vector<std::size_t> order(boxes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  std::vector<std::size_t> kept;
  for (std::size_t idx : order) {
    const bool suppressed = std::any_of(kept.begin(), kept.end(), [&](std::size_t k) {
      return iou(boxes[k], boxes[idx]) > threshold;
    });
    if (!suppressed) kept.push_back(idx);
  }
  return kept;
}

std::vector<ClassDetection> select_class_detections(std::span<const ScoredBox> detections, int cls,
                                                    double nms_threshold, int top_n, double min_score) {
  std::vector<Box> boxes;
  std::vector<double> scores;
  std::vector<int> source;
  const auto c = static_cast<std::size_t>(cls);
  for (std::size_t i = 0; i < detections.size(); ++i) {
    const auto& d = detections[i];
    if (c >= d.scores.size() || d.scores[c] < min_score) continue;
    boxes.push_back(d.box);
    scores.push_back(d.scores[c]);
    source.push_back(static_cast<int>(i));
  }
  const auto kept = nms_per_class(boxes, scores, nms_threshold);
  std::vector<ClassDetection> out;
  for (std::size_t k = 0; k < kept.size() && static_cast<int>(k) < top_n; ++k) {
    const auto i = kept[k];
    out.push_back({boxes[i], scores[i], source[i]});
  }
  return out;
}

}  // namespace actube
