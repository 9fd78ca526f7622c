#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "actube/geometry.hpp"
#include "actube/labelling.hpp"
#include "actube/tube.hpp"

namespace actube {

// Offline two-pass tube construction.
//
// Pass one links class-specific detections into video-long action paths by
// maximising  sum_t s(b_t) + lambda_o * sum_t IoU(b_t, b_{t-1})  with Viterbi,
// extracting paths one after another and removing the detections used.
// Pass two trims each path with a binary Potts labelling.
//
// Frames that have no remaining detection are bridged by ghost boxes: a ghost
// repeats the neighbouring chosen box, has unary 0 and pairwise overlap 1 with
// its predecessor (leading ghosts copy the first real box of the path).

struct PathParams {
  double lambda_o = 1.0;
  int max_paths = 20;
  double min_mean_score = 0.01;

  void validate() const;
};

struct TrimParams {
  double lambda_l = 1.0;
  double default_alpha = 1.0;
  /// Per-class Potts constants indexed by class id; missing entries fall back
  /// to default_alpha.
  std::vector<double> alpha;
  int top_k = 10;

  double alpha_for(int cls) const;
  void validate() const;
};

struct ActionPath {
  int cls = 0;
  std::vector<Box> boxes;
  std::vector<double> unary;
  /// Index into the frame's detection list, -1 for ghost frames.
  std::vector<int> detection;
  double energy = 0.0;

  std::size_t length() const { return boxes.size(); }
  std::size_t ghost_count() const;
};

class OfflineError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using ClassFrames = std::vector<std::vector<ClassDetection>>;

/// Single best path over the detections flagged available (all if empty).
/// Returns false if every frame is empty.
bool best_path(const ClassFrames& frames, const std::vector<std::vector<bool>>& available, double lambda_o,
               ActionPath& out);

/// Repeated path extraction; output ordered by decreasing energy.
/// `ActionPath::detection` indexes into `frames[t]`.
std::vector<ActionPath> build_paths(const ClassFrames& frames, int cls, const PathParams& params);

/// Runs of the optimal binary labelling become tubes scored by the mean of
/// their top-k unaries.
std::vector<ActionTube> viterbi_trim(const ActionPath& path, const TrimParams& params);

struct TemporalProposal {
  int cls = 0;
  int start = 0;
  int end = 0;
  double score = 0.0;

  friend bool operator==(const TemporalProposal&, const TemporalProposal&) = default;
};

/// Frame-level temporal detection: per candidate class, Potts labelling of the
/// frame scores; each positive run is a proposal scored by its mean score.
/// `frame_scores[t][c]` is the score of class c at frame t.
std::vector<TemporalProposal> temporal_detect(const std::vector<std::vector<double>>& frame_scores,
                                              std::span<const int> classes, double lambda, double alpha);

struct OfflineParams {
  PathParams path;
  TrimParams trim;
  double nms_threshold = 0.45;
  int top_n = 10;
  double min_score = 0.01;
};

/// Both passes for every foreground class of one video.
std::vector<ActionTube> build_offline_tubes(std::span<const DetectionFrame> frames, int num_classes,
                                            const OfflineParams& params);

}  // namespace actube
