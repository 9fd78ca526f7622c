#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "actube/geometry.hpp"
#include "actube/microtube.hpp"
#include "actube/tube.hpp"

namespace actube {

struct HorizonParams {
  /// Frames of history averaged into the extrapolation velocity.
  int velocity_window = 5;
  int video_length = 0;
  double width = 0.0;
  double height = 0.0;

  void validate() const;
};

class PredictionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Constant-velocity continuation of `tail` for `horizon` frames. The velocity
/// is the mean per-frame delta over the last min(window, |tail|-1) steps;
/// a tail shorter than two boxes repeats its last box. Boxes are clamped.
std::vector<Box> extrapolate(std::span<const Box> tail, int horizon, const HorizonParams& params);

/// Boxes for frames tube.end+1 .. video_length-1.
///
/// Predictions anchored after `t_now` are ignored. A frame covered by several
/// predictions takes the one with the latest anchor (then the smallest
/// lookahead). Frames between chosen boxes are interpolated; frames after the
/// last chosen box are extrapolated from the tube tail.
std::vector<Box> assemble_future(const ActionTube& tube, std::span<const PredictionSet> predictions, int t_now,
                                 const HorizonParams& params);

/// Detected part followed by `future`, which must start at detected.end + 1.
/// Future frames inherit the tube score.
ActionTube complete_tube(const ActionTube& detected, int future_start, std::span<const Box> future);

}  // namespace actube
