#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "actube/geometry.hpp"
#include "actube/labelling.hpp"
#include "actube/microtube.hpp"
#include "actube/tube.hpp"

namespace actube {

struct OnlineParams {
  /// IoU gate between a tube's last box and a candidate.
  double lambda = 0.1;
  /// Boxes kept per class per frame after NMS.
  int n = 10;
  /// Frames without a match tolerated before a tube is terminated.
  int k_terminate = 5;
  /// Temporal labelling lookback.
  int m = 5;
  double nms_threshold = 0.45;
  double min_score = 0.01;
  double label_weight = 1.0;
  double default_alpha = 1.0;
  std::vector<double> alpha;
  int min_tube_length = 2;

  double alpha_for(int cls) const;
  void validate() const;

  friend bool operator==(const OnlineParams&, const OnlineParams&) = default;
};

class LinkerError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A tube under construction. Boxes cover frames [start, end()] with no gaps;
/// frames bridged after a miss are interpolated and flagged unobserved.
struct LiveTube {
  int id = 0;
  int cls = 0;
  int start = 0;
  std::vector<Box> boxes;
  /// Per-frame score fed to the labeller.
  std::vector<double> frame_scores;
  std::vector<bool> observed;
  double score_sum = 0.0;
  int members = 0;
  /// Frames since the last match, counted through the end of the current step.
  int misses = 0;
  OnlineLabeller labeller;
  /// Predictions carried by the micro-tubes linked into this tube.
  std::vector<PredictionSet> predictions;

  int end() const { return start + static_cast<int>(boxes.size()) - 1; }
  int length() const { return static_cast<int>(boxes.size()); }
  const Box& last_box() const { return boxes.back(); }
  double mean_score() const { return members > 0 ? score_sum / members : 0.0; }

  /// Whole tube without trimming, scored by its mean member score.
  ActionTube as_tube(const std::string& video) const;
  /// Positive runs of the current labelling.
  std::vector<ActionTube> trimmed(const std::string& video) const;

  friend bool operator==(const LiveTube&, const LiveTube&) = default;
};

/// Incremental multi-tube builder for one video.
///
/// Each class is handled independently: candidates are NMS-filtered and cut
/// to the best n, live tubes are visited by decreasing mean score and each
/// claims the highest-scoring unclaimed candidate whose IoU with its last box
/// exceeds lambda; tubes without a match terminate once more than k_terminate
/// frames have passed since their last match; unclaimed candidates start new
/// tubes.
class OnlineLinker {
 public:
  OnlineLinker(int num_classes, OnlineParams params, std::string video = {});

  /// Frame-level detections at frame.t. Frames must arrive in increasing t;
  /// skipped frames count as frames without detections.
  void step(const DetectionFrame& frame);

  /// Micro-tubes spanning (t, t + delta). Calls must be delta apart.
  void link_microtubes(int t, int delta, std::span<const MicroTube> microtubes);

  /// Class of the highest mean-score tube (lowest class on ties).
  std::optional<int> predict_label() const;

  /// Terminates every live tube and returns all retained tubes, trimmed by
  /// their temporal labelling, ordered by class then tube id.
  std::vector<ActionTube> finish();

  const std::vector<LiveTube>& active(int cls) const { return active_.at(index(cls)); }
  const std::vector<LiveTube>& terminated(int cls) const { return terminated_.at(index(cls)); }
  int num_classes() const { return num_classes_; }
  int time() const { return t_; }
  const OnlineParams& params() const { return params_; }
  const std::string& video() const { return video_; }

  friend bool operator==(const OnlineLinker&, const OnlineLinker&) = default;

 private:
  struct Candidate {
    Box first;
    std::optional<Box> second;
    double score = 0.0;
    const MicroTube* source = nullptr;
  };

  std::size_t index(int cls) const;
  void advance_class(int cls, int t, int delta, std::vector<Candidate> candidates);
  void attach(LiveTube& tube, int t, int delta, const Candidate& cand) const;
  LiveTube spawn(int cls, int t, int delta, const Candidate& cand);
  void retire(int cls, LiveTube tube);

  int num_classes_ = 0;
  OnlineParams params_;
  std::string video_;
  int t_ = -1;
  int delta_ = 0;
  int next_id_ = 0;
  std::vector<std::vector<LiveTube>> active_;
  std::vector<std::vector<LiveTube>> terminated_;
};

}  // namespace actube
