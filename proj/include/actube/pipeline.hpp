#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "actube/evaluation.hpp"
#include "actube/future.hpp"
#include "actube/geometry.hpp"
#include "actube/microtube.hpp"
#include "actube/online.hpp"
#include "actube/tube.hpp"

namespace actube {

// Whole-video drivers shared by the command-line tool and the bindings.

template <typename Frame>
struct VideoStream {
  std::string video;
  std::vector<Frame> frames;
};

using DetectionStream = VideoStream<DetectionFrame>;
using MicroTubeStream = VideoStream<MicroTubeFrame>;

/// Groups frames by video (first-appearance order), keeping input order
/// within each video.
std::vector<DetectionStream> group_by_video(std::vector<DetectionFrame> frames);
std::vector<MicroTubeStream> group_by_video(std::vector<MicroTubeFrame> frames);

/// Last frame index + 1 over the stream.
int stream_length(const DetectionStream& s);
int stream_length(const MicroTubeStream& s);

/// Online tubes of one video from frame-level detections.
std::vector<ActionTube> run_online(const DetectionStream& stream, int num_classes, const OnlineParams& params);

/// Online tubes of one video from micro-tubes.
std::vector<ActionTube> run_micro(const MicroTubeStream& stream, int num_classes, const OnlineParams& params);

/// Label predicted after observing each fraction of a `length`-frame video
/// (frames 0 .. observed_frames(f, length) - 1).
std::vector<std::optional<int>> early_labels(const DetectionStream& stream, int num_classes,
                                             const OnlineParams& params, std::span<const double> fractions,
                                             int length);
std::vector<std::optional<int>> early_labels(const MicroTubeStream& stream, int num_classes,
                                             const OnlineParams& params, std::span<const double> fractions,
                                             int length);

/// Observes the micro-tubes whose second frame is at most `last_observed`,
/// then completes every live tube to the end of the video from its attached
/// predictions. Tubes terminated before that point are returned as built.
std::vector<ActionTube> complete_video(const MicroTubeStream& stream, int num_classes, const OnlineParams& params,
                                       const HorizonParams& horizon, int last_observed);

/// Runs `fn(i)` for i in [0, count) on up to `threads` workers. Results must
/// be written to slot i so the output order does not depend on scheduling.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace actube
