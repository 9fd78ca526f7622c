#pragma once

#include <optional>
#include <string>
#include <vector>

#include "actube/geometry.hpp"

namespace actube {

/// Boxes predicted alongside a micro-tube anchored at frame `anchor_t`:
/// an optional past box at anchor_t - delta_p and future boxes at
/// anchor_t + delta_f * k for k = 1..future.size().
struct PredictionSet {
  int anchor_t = 0;
  int delta_p = 1;
  int delta_f = 1;
  std::optional<Box> past;
  std::vector<Box> future;

  int n_future() const { return static_cast<int>(future.size()); }
  int future_frame(int k) const { return anchor_t + delta_f * k; }

  friend bool operator==(const PredictionSet&, const PredictionSet&) = default;
};

/// Two implicitly linked boxes on frames t and t + delta.
struct MicroTube {
  Box b1;
  Box b2;
  std::vector<double> scores;
  std::optional<PredictionSet> pred;

  friend bool operator==(const MicroTube&, const MicroTube&) = default;
};

/// All micro-tubes of one (t, t + delta) frame pair of a video.
struct MicroTubeFrame {
  std::string video;
  int t = 0;
  int delta = 1;
  std::vector<MicroTube> tubes;

  friend bool operator==(const MicroTubeFrame&, const MicroTubeFrame&) = default;
};

}  // namespace actube
