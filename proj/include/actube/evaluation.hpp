#pragma once

#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "actube/geometry.hpp"
#include "actube/tube.hpp"

namespace actube {

struct GtTube {
  std::string video;
  int cls = 0;
  int start = 0;
  int end = -1;
  std::vector<Box> boxes;

  bool contains(int t) const { return t >= start && t <= end; }
  const Box& box_at(int t) const { return boxes.at(static_cast<std::size_t>(t - start)); }

  friend bool operator==(const GtTube&, const GtTube&) = default;
};

/// Frames over which the spatial IoU is averaged.
enum class SpatialAveraging {
  /// Frames present in both tubes.
  intersection,
  /// All ground-truth frames; frames missing from the detection score 0.
  gt_duration,
};

struct EvalConfig {
  double delta = 0.5;
  std::vector<double> delta_sweep = default_sweep();
  std::vector<double> fractions = default_fractions();
  SpatialAveraging averaging = SpatialAveraging::intersection;

  /// 0.5, 0.55, ..., 0.95
  static std::vector<double> default_sweep();
  /// 0.1, 0.2, ..., 1.0
  static std::vector<double> default_fractions();
  void validate() const;
};

class EvalError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

double temporal_iou(int a_start, int a_end, int b_start, int b_end);

/// Temporal IoU times the mean spatial IoU.
double st_iou(const ActionTube& det, const GtTube& gt, SpatialAveraging averaging = SpatialAveraging::intersection);

/// All-point interpolated average precision of one class.
///
/// Detections are visited by descending score (ties: video id, then input
/// order); each claims the unclaimed same-video ground truth with the highest
/// ST-IoU if that overlap is >= delta, otherwise it is a false positive.
double class_ap(std::span<const ActionTube> dets, std::span<const GtTube> gts, double delta,
                SpatialAveraging averaging = SpatialAveraging::intersection);

struct MapResult {
  double mean = 0.0;
  /// Class id -> AP, for every class present in the ground truth.
  std::map<int, double> per_class;
};

/// Mean class AP over the classes present in `gts`. Throws on empty `gts`.
MapResult video_map(std::span<const ActionTube> dets, std::span<const GtTube> gts, double delta,
                    SpatialAveraging averaging = SpatialAveraging::intersection);

/// video_map averaged over `sweep`.
double avg_map(std::span<const ActionTube> dets, std::span<const GtTube> gts, std::span<const double> sweep,
               SpatialAveraging averaging = SpatialAveraging::intersection);

/// Number of frames observed at fraction f of a video of `length` frames.
int observed_frames(double fraction, int length);

/// Completed tubes scored against the full ground truth.
MapResult completion_map(std::span<const ActionTube> completed, std::span<const GtTube> gts, double delta,
                         SpatialAveraging averaging = SpatialAveraging::intersection);

/// Only the parts after each video's observation boundary are compared.
/// `last_observed[video]` is the last observed frame and `lengths[video]` the
/// video length; videos observed to their end are left out.
MapResult prediction_map(std::span<const ActionTube> completed, std::span<const GtTube> gts,
                         const std::map<std::string, int>& last_observed, const std::map<std::string, int>& lengths,
                         double delta, SpatialAveraging averaging = SpatialAveraging::intersection);

/// Tube restricted to frames after `boundary`; nullopt if nothing remains.
std::optional<ActionTube> after_frame(const ActionTube& tube, int boundary);
std::optional<GtTube> after_frame(const GtTube& tube, int boundary);

/// Fraction of videos whose prediction equals the ground-truth label, one
/// entry per observation fraction. `predicted[video][k]` is the label at
/// fraction k; a missing label counts as wrong.
std::vector<double> early_accuracy(const std::map<std::string, std::vector<std::optional<int>>>& predicted,
                                   const std::map<std::string, int>& gt_labels, std::size_t num_fractions);

/// Video label = most frequent ground-truth class (lowest id on ties).
std::map<std::string, int> video_labels(std::span<const GtTube> gts);

}  // namespace actube
