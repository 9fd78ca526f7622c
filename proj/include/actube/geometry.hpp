#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace actube {

/// Axis-aligned rectangle in continuous pixel coordinates (origin top-left).
struct Box {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  double width() const { return x_max > x_min ? x_max - x_min : 0.0; }
  double height() const { return y_max > y_min ? y_max - y_min : 0.0; }
  double area() const { return width() * height(); }

  /// Ordered corners and finite coordinates.
  bool valid() const;

  friend bool operator==(const Box&, const Box&) = default;
};

/// A box with a (C+1)-long score vector; index 0 is background.
struct ScoredBox {
  Box box;
  std::vector<double> scores;

  double score(int cls) const { return scores.at(static_cast<std::size_t>(cls)); }

  friend bool operator==(const ScoredBox&, const ScoredBox&) = default;
};

/// All detections of one video frame.
struct DetectionFrame {
  std::string video;
  int t = 0;
  int width = 0;
  int height = 0;
  std::vector<ScoredBox> detections;

  friend bool operator==(const DetectionFrame&, const DetectionFrame&) = default;
};

class GeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

double iou(const Box& a, const Box& b);

/// delta+1 boxes linearly interpolated between the endpoints (inclusive).
/// Throws GeometryError when delta < 1.
std::vector<Box> interpolate_pair(const Box& first, const Box& last, int delta);

/// Clip coordinates to [0,width]x[0,height].
Box clamp(const Box& b, double width, double height);

/// Greedy per-class non-maximum suppression.
///
/// Boxes are visited by descending score (equal scores: lower input index
/// first). A box is dropped iff its IoU with an already kept box exceeds
/// `threshold`. Returns the indices of kept boxes in visiting order.
std::vector<std::size_t> nms_per_class(std::span<const Box> boxes, std::span<const double> scores,
                                       double threshold);

/// One box seen through a single class: its score for that class and its
/// index in the originating detection list.
struct ClassDetection {
  Box box;
  double score = 0.0;
  int source = -1;

  friend bool operator==(const ClassDetection&, const ClassDetection&) = default;
};

/// Per-class candidate selection: drop boxes scoring below `min_score`, run
/// NMS at `nms_threshold`, keep the best `top_n` (descending score).
std::vector<ClassDetection> select_class_detections(std::span<const ScoredBox> detections, int cls,
                                                    double nms_threshold, int top_n, double min_score);

}  // namespace actube
