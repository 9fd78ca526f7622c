#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "actube/evaluation.hpp"
#include "actube/geometry.hpp"
#include "actube/microtube.hpp"

namespace actube {

// Synthetic scenes with known ground truth.
//
// Every video draws from its own generator, seeded from the scenario seed and
// the video index through SplitMix64, so videos can be produced in any order
// or in parallel. Detection, micro-tube and prediction noise use further
// per-video streams, separate from the scene layout.

/// std::mt19937_64 with the distribution transforms written out, since the
/// standard distributions are free to differ between library vendors.
class SimRng {
 public:
  explicit SimRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer on [lo, hi].
  int uniform_int(int lo, int hi);
  /// Standard normal (Box-Muller, one value per call).
  double normal();
  /// Poisson by Knuth's product method.
  int poisson(double mean);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t& state);

/// Sub-seed of stream `stream` of video `video_index`.
std::uint64_t derive_seed(std::uint64_t seed, int video_index, int stream);

enum class MotionModel { static_box, constant_velocity, random_walk };

MotionModel parse_motion_model(std::string_view name);
std::string_view to_string(MotionModel m);

struct ScenarioConfig {
  std::uint64_t seed = 0;
  int videos = 10;
  int frames = 100;
  int width = 320;
  int height = 240;
  int num_classes = 3;
  int min_instances = 1;
  int max_instances = 2;
  MotionModel motion = MotionModel::static_box;
  double vx = 2.0;
  double vy = 0.0;
  double sigma_walk = 1.0;
  double min_box = 30.0;
  double max_box = 60.0;
  /// Instance duration as a fraction of the video length.
  double min_duration = 0.5;
  double max_duration = 1.0;
  /// Instance starts and ends fall on multiples of this stride.
  int boundary_stride = 1;
  /// The first instance of every video starts at frame 0.
  bool anchor_first = true;
  /// Frames of separation required between instances sharing image space.
  int temporal_gap = 6;

  void validate() const;
};

struct NoiseModel {
  double sigma_box = 0.0;
  double sigma_score = 0.0;
  double p_miss = 0.0;
  double fp_rate = 0.0;
  double fp_score_min = 0.0;
  double fp_score_max = 0.3;

  void validate() const;
};

struct VideoInfo {
  std::string video;
  int index = 0;
  int length = 0;
  int width = 0;
  int height = 0;
  /// Class shared by every instance of the video.
  int label = 0;

  friend bool operator==(const VideoInfo&, const VideoInfo&) = default;
};

struct Scenario {
  ScenarioConfig config;
  std::vector<VideoInfo> videos;
  /// Ordered by video, then start frame.
  std::vector<GtTube> tubes;

  std::vector<GtTube> tubes_of(const std::string& video) const;
};

class SimError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::string video_name(int index);

Scenario generate_scenario(const ScenarioConfig& config);

struct VideoScene {
  VideoInfo info;
  std::vector<GtTube> tubes;
};

/// One video of the scenario; generate_scenario concatenates these.
VideoScene generate_video(const ScenarioConfig& config, int index);

/// Per-frame detections of one video, frames 0..length-1 (empty frames too).
std::vector<DetectionFrame> render_frames(const ScenarioConfig& config, const VideoInfo& info,
                                          std::span<const GtTube> gts, const NoiseModel& noise);

enum class PredictionMode { none, oracle, hold };

PredictionMode parse_prediction_mode(std::string_view name);

struct MicroRenderParams {
  int delta = 1;
  PredictionMode predictions = PredictionMode::none;
  int delta_p = 1;
  int delta_f = 1;
  int n_future = 4;

  void validate() const;
};

/// Micro-tubes on frame pairs (t, t + delta) for t = 0, delta, 2 delta, ...
/// with t + delta inside the video (empty pairs too).
std::vector<MicroTubeFrame> render_microtubes(const ScenarioConfig& config, const VideoInfo& info,
                                              std::span<const GtTube> gts, const NoiseModel& noise,
                                              const MicroRenderParams& params);

/// Score vector of a detection of class `cls` with confidence `s`:
/// s for the class, 1 - s for background, 0 elsewhere.
std::vector<double> class_scores(int num_classes, int cls, double s);

}  // namespace actube
