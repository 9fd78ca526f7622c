#include "actube/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace actube {

namespace {

enum Stream { kLayout = 0, kFrames = 1, kMicro = 2 };

constexpr int kPlacementAttempts = 200;

Box jitter(const Box& b, SimRng& rng, double sigma, double w, double h) {
  const double x1 = b.x_min + sigma * rng.normal();
  const double y1 = b.y_min + sigma * rng.normal();
  const double x2 = b.x_max + sigma * rng.normal();
  const double y2 = b.y_max + sigma * rng.normal();
  return clamp({std::min(x1, x2), std::min(y1, y2), std::max(x1, x2), std::max(y1, y2)}, w, h);
}

double true_score(SimRng& rng, double sigma) {
  return std::clamp(1.0 - std::abs(sigma * rng.normal()), 0.05, 1.0);
}

Box random_box(SimRng& rng, const ScenarioConfig& c) {
  const double w = rng.uniform(c.min_box, c.max_box);
  const double h = rng.uniform(c.min_box, c.max_box);
  const double x = rng.uniform(0.0, c.width - w);
  const double y = rng.uniform(0.0, c.height - h);
  return {x, y, x + w, y + h};
}

Box hull(const GtTube& t) {
  Box out = t.boxes.front();
  for (const auto& b : t.boxes) {
    out.x_min = std::min(out.x_min, b.x_min);
    out.y_min = std::min(out.y_min, b.y_min);
    out.x_max = std::max(out.x_max, b.x_max);
    out.y_max = std::max(out.y_max, b.y_max);
  }
  return out;
}

bool overlaps(const Box& a, const Box& b) {
  return std::min(a.x_max, b.x_max) > std::max(a.x_min, b.x_min) &&
         std::min(a.y_max, b.y_max) > std::max(a.y_min, b.y_min);
}

bool conflicts(const GtTube& a, const GtTube& b, int gap) {
  if (a.start > b.end + gap || b.start > a.end + gap) return false;
  return overlaps(hull(a), hull(b));
}

GtTube make_instance(const ScenarioConfig& c, const VideoInfo& info, SimRng& rng, bool first) {
  const int stride = c.boundary_stride;
  const int max_span = ((info.length - 1) / stride) * stride;
  const double frac = rng.uniform(c.min_duration, c.max_duration);
  int span = static_cast<int>(std::lround(frac * info.length)) - 1;
  span = (std::max(span, 0) / stride) * stride;
  span = std::clamp(span, std::min(stride, max_span), max_span);

  const int slots = (info.length - 1 - span) / stride;
  const int start_slot = rng.uniform_int(0, slots);
  const int start = (first && c.anchor_first) ? 0 : start_slot * stride;

  const double w = rng.uniform(c.min_box, c.max_box);
  const double h = rng.uniform(c.min_box, c.max_box);
  double x_lo = 0.0;
  double x_hi = c.width - w;
  double y_lo = 0.0;
  double y_hi = c.height - h;
  if (c.motion == MotionModel::constant_velocity) {
    const double dx = c.vx * span;
    const double dy = c.vy * span;
    if (std::max(0.0, -dx) <= c.width - w - std::max(0.0, dx)) {
      x_lo = std::max(0.0, -dx);
      x_hi = c.width - w - std::max(0.0, dx);
    }
    if (std::max(0.0, -dy) <= c.height - h - std::max(0.0, dy)) {
      y_lo = std::max(0.0, -dy);
      y_hi = c.height - h - std::max(0.0, dy);
    }
  }
  const double x0 = rng.uniform(x_lo, x_hi);
  const double y0 = rng.uniform(y_lo, y_hi);

  GtTube tube;
  tube.video = info.video;
  tube.cls = info.label;
  tube.start = start;
  tube.end = start + span;
  double cx = x0;
  double cy = y0;
  for (int k = 0; k <= span; ++k) {
    switch (c.motion) {
      case MotionModel::static_box:
        tube.boxes.push_back({x0, y0, x0 + w, y0 + h});
        break;
      case MotionModel::constant_velocity:
        tube.boxes.push_back(clamp({x0 + k * c.vx, y0 + k * c.vy, x0 + w + k * c.vx, y0 + h + k * c.vy},
                                   c.width, c.height));
        break;
      case MotionModel::random_walk:
        if (k > 0) {
          cx = std::clamp(cx + c.sigma_walk * rng.normal(), 0.0, c.width - w);
          cy = std::clamp(cy + c.sigma_walk * rng.normal(), 0.0, c.height - h);
        }
        tube.boxes.push_back({cx, cy, cx + w, cy + h});
        break;
    }
  }
  return tube;
}

}  // namespace

double SimRng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

int SimRng::uniform_int(int lo, int hi) {
  if (hi <= lo) return lo;
  const auto range = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<int>(engine_() % range);
}

double SimRng::normal() {
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

int SimRng::poisson(double mean) {
  const double limit = std::exp(-mean);
  int k = 0;
  double p = 1.0;
  do {
    ++k;
    p *= uniform();
  } while (p > limit);
  return k - 1;
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, int video_index, int stream) {
  std::uint64_t state = seed;
  const std::uint64_t base = splitmix64(state);
  state = base ^ (static_cast<std::uint64_t>(video_index) << 8) ^ static_cast<std::uint64_t>(stream);
  return splitmix64(state);
}

MotionModel parse_motion_model(std::string_view name) {
  if (name == "static") return MotionModel::static_box;
  if (name == "constant_velocity" || name == "cv") return MotionModel::constant_velocity;
  if (name == "random_walk" || name == "walk") return MotionModel::random_walk;
  throw SimError("unknown motion model: " + std::string(name));
}

std::string_view to_string(MotionModel m) {
  switch (m) {
    case MotionModel::static_box:
      return "static";
    case MotionModel::constant_velocity:
      return "constant_velocity";
    case MotionModel::random_walk:
      return "random_walk";
  }
  return "static";
}

void ScenarioConfig::validate() const {
  if (videos < 1) throw SimError("scenario.videos must be >= 1");
  if (frames < 1) throw SimError("scenario.frames must be >= 1");
  if (width < 1 || height < 1) throw SimError("scenario image size must be >= 1");
  if (num_classes < 1) throw SimError("scenario.num_classes must be >= 1");
  if (min_instances < 1 || max_instances < min_instances)
    throw SimError("scenario instance range must satisfy 1 <= min <= max");
  if (!(sigma_walk >= 0.0)) throw SimError("scenario.sigma_walk must be >= 0");
  if (!std::isfinite(vx) || !std::isfinite(vy)) throw SimError("scenario velocity must be finite");
  if (!(min_box > 0.0 && min_box <= max_box)) throw SimError("scenario box range must satisfy 0 < min <= max");
  if (max_box > std::min(width, height))
    throw SimError("scenario.max_box " + std::to_string(max_box) + " does not fit a " + std::to_string(width) +
                   "x" + std::to_string(height) + " image");
  if (!(min_duration > 0.0 && min_duration <= max_duration && max_duration <= 1.0))
    throw SimError("scenario duration range must satisfy 0 < min <= max <= 1");
  if (boundary_stride < 1) throw SimError("scenario.boundary_stride must be >= 1");
  if (temporal_gap < 0) throw SimError("scenario.temporal_gap must be >= 0");
}

void NoiseModel::validate() const {
  if (!(sigma_box >= 0.0) || !(sigma_score >= 0.0)) throw SimError("noise sigmas must be >= 0");
  if (!(p_miss >= 0.0 && p_miss <= 1.0)) throw SimError("noise.p_miss must be in [0,1]");
  if (!(fp_rate >= 0.0)) throw SimError("noise.fp_rate must be >= 0");
  if (!(fp_score_min >= 0.0 && fp_score_min <= fp_score_max && fp_score_max <= 1.0))
    throw SimError("noise fp score range must satisfy 0 <= min <= max <= 1");
}

std::vector<GtTube> Scenario::tubes_of(const std::string& video) const {
  std::vector<GtTube> out;
  for (const auto& t : tubes)
    if (t.video == video) out.push_back(t);
  return out;
}

std::string video_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "video_%04d", index);
  return buf;
}

VideoScene generate_video(const ScenarioConfig& config, int index) {
  SimRng rng(derive_seed(config.seed, index, kLayout));
  VideoScene scene;
  auto& info = scene.info;
  info.video = video_name(index);
  info.index = index;
  info.length = config.frames;
  info.width = config.width;
  info.height = config.height;
  info.label = rng.uniform_int(1, config.num_classes);

  const int count = rng.uniform_int(config.min_instances, config.max_instances);
  for (int i = 0; i < count; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < kPlacementAttempts && !placed; ++attempt) {
      auto tube = make_instance(config, info, rng, i == 0);
      const bool clash = std::any_of(scene.tubes.begin(), scene.tubes.end(),
                                     [&](const GtTube& o) { return conflicts(o, tube, config.temporal_gap); });
      if (!clash) {
        scene.tubes.push_back(std::move(tube));
        placed = true;
      }
    }
    if (!placed) {
      if (i < config.min_instances)
        throw SimError("cannot place " + std::to_string(config.min_instances) + " disjoint instances in " +
                       info.video + "; reduce box size or instance count");
      break;
    }
  }
  std::stable_sort(scene.tubes.begin(), scene.tubes.end(),
                   [](const GtTube& a, const GtTube& b) { return a.start < b.start; });
  return scene;
}

Scenario generate_scenario(const ScenarioConfig& config) {
  config.validate();
  Scenario s;
  s.config = config;
  for (int v = 0; v < config.videos; ++v) {
    auto scene = generate_video(config, v);
    s.videos.push_back(scene.info);
    s.tubes.insert(s.tubes.end(), scene.tubes.begin(), scene.tubes.end());
  }
  return s;
}

std::vector<double> class_scores(int num_classes, int cls, double s) {
  std::vector<double> out(static_cast<std::size_t>(num_classes) + 1, 0.0);
  out[0] = 1.0 - s;
  out[static_cast<std::size_t>(cls)] = s;
  return out;
}

std::vector<DetectionFrame> render_frames(const ScenarioConfig& config, const VideoInfo& info,
                                          std::span<const GtTube> gts, const NoiseModel& noise) {
  noise.validate();
  SimRng rng(derive_seed(config.seed, info.index, kFrames));
  const double w = info.width;
  const double h = info.height;
  std::vector<DetectionFrame> frames;
  frames.reserve(static_cast<std::size_t>(info.length));
  for (int t = 0; t < info.length; ++t) {
    DetectionFrame f{info.video, t, info.width, info.height, {}};
    for (const auto& gt : gts) {
      if (!gt.contains(t)) continue;
      const bool missed = rng.uniform() < noise.p_miss;
      const Box b = jitter(gt.box_at(t), rng, noise.sigma_box, w, h);
      const double s = true_score(rng, noise.sigma_score);
      if (!missed) f.detections.push_back({b, class_scores(config.num_classes, gt.cls, s)});
    }
    const int fps = rng.poisson(noise.fp_rate);
    for (int k = 0; k < fps; ++k) {
      const Box b = random_box(rng, config);
      const int cls = rng.uniform_int(1, config.num_classes);
      const double s = rng.uniform(noise.fp_score_min, noise.fp_score_max);
      f.detections.push_back({b, class_scores(config.num_classes, cls, s)});
    }
    frames.push_back(std::move(f));
  }
  return frames;
}

PredictionMode parse_prediction_mode(std::string_view name) {
  if (name == "none") return PredictionMode::none;
  if (name == "oracle") return PredictionMode::oracle;
  if (name == "hold") return PredictionMode::hold;
  throw SimError("unknown prediction mode: " + std::string(name));
}

void MicroRenderParams::validate() const {
  if (delta < 1) throw SimError("micro-tube delta must be >= 1");
  if (delta_p < 1 || delta_f < 1) throw SimError("prediction strides must be >= 1");
  if (n_future < 0) throw SimError("prediction n_future must be >= 0");
}

std::vector<MicroTubeFrame> render_microtubes(const ScenarioConfig& config, const VideoInfo& info,
                                              std::span<const GtTube> gts, const NoiseModel& noise,
                                              const MicroRenderParams& params) {
  noise.validate();
  params.validate();
  SimRng rng(derive_seed(config.seed, info.index, kMicro));
  const double w = info.width;
  const double h = info.height;
  const int delta = params.delta;
  std::vector<MicroTubeFrame> out;
  for (int t = 0; t + delta < info.length; t += delta) {
    MicroTubeFrame f{info.video, t, delta, {}};
    for (const auto& gt : gts) {
      if (!gt.contains(t) || !gt.contains(t + delta)) continue;
      const bool missed = rng.uniform() < noise.p_miss;
      MicroTube mt;
      mt.b1 = jitter(gt.box_at(t), rng, noise.sigma_box, w, h);
      mt.b2 = jitter(gt.box_at(t + delta), rng, noise.sigma_box, w, h);
      mt.scores = class_scores(config.num_classes, gt.cls, true_score(rng, noise.sigma_score));
      if (params.predictions != PredictionMode::none) {
        PredictionSet p;
        p.anchor_t = t;
        p.delta_p = params.delta_p;
        p.delta_f = params.delta_f;
        if (gt.contains(t - params.delta_p)) p.past = jitter(gt.box_at(t - params.delta_p), rng, noise.sigma_box, w, h);
        for (int k = 1; k <= params.n_future; ++k) {
          const int frame = p.future_frame(k);
          if (!gt.contains(frame)) break;
          const Box oracle = jitter(gt.box_at(frame), rng, noise.sigma_box, w, h);
          p.future.push_back(params.predictions == PredictionMode::oracle ? oracle : mt.b2);
        }
        mt.pred = std::move(p);
      }
      if (!missed) f.tubes.push_back(std::move(mt));
    }
    const int fps = rng.poisson(noise.fp_rate);
    for (int k = 0; k < fps; ++k) {
      MicroTube mt;
      mt.b1 = random_box(rng, config);
      mt.b2 = jitter(mt.b1, rng, 0.1 * config.min_box, w, h);
      const int cls = rng.uniform_int(1, config.num_classes);
      mt.scores = class_scores(config.num_classes, cls, rng.uniform(noise.fp_score_min, noise.fp_score_max));
      f.tubes.push_back(std::move(mt));
    }
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace actube
