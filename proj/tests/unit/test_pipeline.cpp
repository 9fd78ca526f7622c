#include <doctest.h>

#include <atomic>

#include "actube/pipeline.hpp"
#include "actube/sim.hpp"

using namespace actube;

namespace {

struct World {
  ScenarioConfig config;
  Scenario scenario;
};

World world(int videos, MotionModel motion) {
  World w;
  w.config.seed = 99;
  w.config.videos = videos;
  w.config.frames = 91;
  w.config.boundary_stride = 15;
  w.config.motion = motion;
  w.config.vx = 1.5;
  w.config.vy = 0.5;
  w.scenario = generate_scenario(w.config);
  return w;
}

}  // namespace

TEST_CASE("grouping keeps first-appearance order") {
  std::vector<DetectionFrame> frames{{"b", 0, 1, 1, {}}, {"a", 0, 1, 1, {}}, {"b", 1, 1, 1, {}}};
  const auto streams = group_by_video(frames);
  REQUIRE(streams.size() == 2);
  CHECK(streams[0].video == "b");
  CHECK(streams[0].frames.size() == 2);
  CHECK(stream_length(streams[0]) == 2);
  std::vector<MicroTubeFrame> micro{{"v", 0, 3, {}}, {"v", 3, 3, {}}};
  CHECK(stream_length(group_by_video(micro)[0]) == 7);
}

TEST_CASE("noiseless frames and micro-tubes give the same tubes") {
  const auto w = world(4, MotionModel::static_box);
  for (const auto& info : w.scenario.videos) {
    const auto gts = w.scenario.tubes_of(info.video);
    const DetectionStream frames{info.video, render_frames(w.config, info, gts, NoiseModel{})};
    const auto from_frames = run_online(frames, 3, OnlineParams{});
    REQUIRE(from_frames.size() == gts.size());
    for (int delta : {1, 3, 5}) {
      MicroRenderParams p;
      p.delta = delta;
      const MicroTubeStream micro{info.video, render_microtubes(w.config, info, gts, NoiseModel{}, p)};
      const auto from_micro = run_micro(micro, 3, OnlineParams{});
      REQUIRE(from_micro.size() == gts.size());
      for (std::size_t k = 0; k < gts.size(); ++k) {
        CHECK(from_micro[k].start == from_frames[k].start);
        CHECK(from_micro[k].end == from_frames[k].end);
        CHECK(from_micro[k].boxes == from_frames[k].boxes);
      }
    }
  }
}

TEST_CASE("early labels use only the observed prefix") {
  const auto w = world(3, MotionModel::static_box);
  const auto& info = w.scenario.videos[0];
  const auto gts = w.scenario.tubes_of(info.video);
  const DetectionStream frames{info.video, render_frames(w.config, info, gts, NoiseModel{})};
  const std::vector<double> fractions{0.1, 0.5, 1.0};
  const auto labels = early_labels(frames, 3, OnlineParams{}, fractions, info.length);
  REQUIRE(labels.size() == 3);
  for (const auto& l : labels) CHECK(l == info.label);

  const DetectionStream empty{info.video, {}};
  CHECK_FALSE(early_labels(empty, 3, OnlineParams{}, fractions, 10)[0]);
}

TEST_CASE("oracle predictions complete tubes exactly") {
  ScenarioConfig c;
  c.seed = 8;
  c.videos = 3;
  c.frames = 91;
  c.boundary_stride = 15;
  c.min_duration = 1.0;
  c.max_duration = 1.0;
  c.max_instances = 1;
  c.motion = MotionModel::constant_velocity;
  c.vx = 1.5;
  c.vy = 0.5;
  const auto s = generate_scenario(c);
  MicroRenderParams p;
  p.delta = 3;
  p.delta_f = 3;
  p.n_future = 4;
  p.predictions = PredictionMode::oracle;
  for (const auto& info : s.videos) {
    const auto gts = s.tubes_of(info.video);
    const MicroTubeStream micro{info.video, render_microtubes(c, info, gts, NoiseModel{}, p)};
    const HorizonParams h{5, info.length, double(info.width), double(info.height)};
    const int last_observed = observed_frames(0.5, info.length) - 1;
    const auto done = complete_video(micro, 3, OnlineParams{}, h, last_observed);
    REQUIRE(done.size() == 1);
    CHECK(done[0].start == 0);
    CHECK(done[0].end == info.length - 1);
    for (int t = 0; t < info.length; ++t) CHECK(iou(done[0].box_at(t), gts[0].box_at(t)) > 0.99);
  }
}

TEST_CASE("parallel_for visits every index once and forwards errors") {
  for (int threads : {1, 2, 8}) {
    std::vector<std::atomic<int>> hits(50);
    parallel_for(hits.size(), threads, [&](std::size_t i) { ++hits[i]; });
    for (const auto& h : hits) CHECK(h.load() == 1);
  }
  CHECK_THROWS_AS(parallel_for(10, 4,
                               [](std::size_t i) {
                                 if (i == 7) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
  parallel_for(0, 4, [](std::size_t) { FAIL("called"); });
}
