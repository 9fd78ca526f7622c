#include <doctest.h>

#include "actube/offline.hpp"
#include "actube/sim.hpp"
#include "oracles.hpp"

using namespace actube;

namespace {

ClassDetection det(double x, double score, int src = 0) { return {{x, 0, x + 10, 10}, score, src}; }

}  // namespace

TEST_CASE("best path matches exhaustive enumeration") {
  SimRng rng(23);
  for (int trial = 0; trial < 300; ++trial) {
    const int T = rng.uniform_int(1, 5);
    const auto frames = oracle::random_frames(rng, T, 0, 3);
    const double lambda = rng.uniform(0.0, 2.0);
    const auto expect = oracle::best_path(frames, lambda);
    ActionPath got;
    const bool ok = best_path(frames, {}, lambda, got);
    CHECK(ok == !expect.choice.empty());
    if (!ok) continue;
    CHECK(got.energy == doctest::Approx(expect.energy));
    CHECK(got.detection == expect.choice);
  }
}

TEST_CASE("best path prefers overlap when lambda is large") {
  ClassFrames frames{{det(0, 0.5)}, {det(0, 0.4, 0), det(100, 0.6, 1)}, {det(0, 0.5)}};
  ActionPath p;
  REQUIRE(best_path(frames, {}, 0.0, p));
  CHECK(p.detection == std::vector<int>{0, 1, 0});
  REQUIRE(best_path(frames, {}, 1.0, p));
  CHECK(p.detection == std::vector<int>{0, 0, 0});
  CHECK(p.energy == doctest::Approx(1.4 + 2.0));
}

TEST_CASE("ghost frames bridge gaps") {
  ClassFrames frames{{}, {det(0, 0.5)}, {}, {det(2, 0.5)}};
  ActionPath p;
  REQUIRE(best_path(frames, {}, 1.0, p));
  CHECK(p.detection == std::vector<int>{-1, 0, -1, 0});
  CHECK(p.ghost_count() == 2);
  CHECK(p.boxes[0] == frames[1][0].box);
  CHECK(p.boxes[2] == frames[1][0].box);
  CHECK(p.unary == std::vector<double>{0.0, 0.5, 0.0, 0.5});
  CHECK(p.energy == doctest::Approx(1.0 + 0.5 + 1.0 + 0.5 + iou(frames[1][0].box, frames[3][0].box)));
  ClassFrames empty(3);
  CHECK_FALSE(best_path(empty, {}, 1.0, p));
}

TEST_CASE("paths are extracted without reusing detections") {
  ClassFrames frames(6);
  for (int t = 0; t < 6; ++t) frames[static_cast<std::size_t>(t)] = {det(0, 0.9, 0), det(100, 0.6, 1)};
  PathParams pp;
  const auto paths = build_paths(frames, 2, pp);
  REQUIRE(paths.size() == 2);
  CHECK(paths[0].cls == 2);
  CHECK(paths[0].detection == std::vector<int>(6, 0));
  CHECK(paths[1].detection == std::vector<int>(6, 1));
  CHECK(paths[0].energy > paths[1].energy);
  pp.max_paths = 1;
  CHECK(build_paths(frames, 2, pp).size() == 1);
  pp.max_paths = 5;
  pp.min_mean_score = 0.7;
  CHECK(build_paths(frames, 2, pp).size() == 1);
  CHECK_THROWS_AS(build_paths({}, 1, PathParams{}), OfflineError);
}

TEST_CASE("extraction stops once most frames are exhausted") {
  ClassFrames frames(4);
  frames[0] = {det(0, 0.9), det(50, 0.9, 1)};
  frames[1] = {det(0, 0.9)};
  frames[2] = {det(0, 0.9)};
  frames[3] = {det(0, 0.9)};
  const auto paths = build_paths(frames, 1, PathParams{});
  CHECK(paths.size() == 1);
}

TEST_CASE("trimming splits a path at low-score runs") {
  ActionPath path;
  path.cls = 1;
  path.unary = {0.9, 0.8, 0.1, 0.05, 0.1, 0.9, 0.7};
  for (int t = 0; t < 7; ++t) path.boxes.push_back({double(t), 0, t + 10.0, 10});
  path.detection.assign(7, 0);
  TrimParams tp;
  tp.default_alpha = 0.2;
  tp.top_k = 1;
  const auto tubes = viterbi_trim(path, tp);
  REQUIRE(tubes.size() == 2);
  CHECK(tubes[0].start == 0);
  CHECK(tubes[0].end == 1);
  CHECK(tubes[0].score == doctest::Approx(0.9));
  CHECK(tubes[1].start == 5);
  CHECK(tubes[1].end == 6);
  CHECK(tubes[1].boxes.front() == path.boxes[5]);
  CHECK(tubes[1].contiguous());

  tp.alpha = {0.0, 5.0};
  const auto whole = viterbi_trim(path, tp);
  REQUIRE(whole.size() == 1);
  CHECK(whole[0].length() == 7);
  CHECK(tp.alpha_for(1) == 5.0);
  CHECK(tp.alpha_for(2) == 0.2);
}

TEST_CASE("trimmed runs equal the exhaustive labelling") {
  SimRng rng(29);
  for (int trial = 0; trial < 100; ++trial) {
    const int T = rng.uniform_int(1, 10);
    ActionPath path;
    path.cls = 1;
    for (int t = 0; t < T; ++t) {
      path.unary.push_back(rng.uniform());
      path.boxes.push_back({0, 0, 10, 10});
    }
    TrimParams tp;
    tp.default_alpha = rng.uniform(0.0, 1.5);
    const auto expect = positive_runs(oracle::best_labelling(path.unary, tp.default_alpha));
    const auto tubes = viterbi_trim(path, tp);
    REQUIRE(tubes.size() == expect.size());
    for (std::size_t k = 0; k < tubes.size(); ++k) {
      CHECK(tubes[k].start == expect[k].first);
      CHECK(tubes[k].end == expect[k].second);
    }
  }
}

TEST_CASE("temporal detection over frame scores") {
  std::vector<std::vector<double>> fs;
  for (int t = 0; t < 8; ++t) fs.push_back({0.0, t < 4 ? 0.9 : 0.1, t >= 5 ? 0.8 : 0.1});
  const std::vector<int> classes{1, 2};
  const auto props = temporal_detect(fs, classes, 1.0, 0.5);
  REQUIRE(props.size() == 2);
  CHECK(props[0].cls == 1);
  CHECK(props[0].start == 0);
  CHECK(props[0].end == 3);
  CHECK(props[0].score == doctest::Approx(0.9));
  CHECK(props[1].cls == 2);
  CHECK(props[1].start == 5);
  CHECK(props[1].score == doctest::Approx(0.8));
  CHECK_THROWS_AS(temporal_detect({}, classes, 1.0, 0.5), OfflineError);
}

TEST_CASE("offline tubes from detections") {
  std::vector<DetectionFrame> frames;
  for (int t = 0; t < 10; ++t) {
    DetectionFrame f{"v", t, 100, 100, {}};
    if (t >= 2 && t <= 7) f.detections.push_back({{10, 10, 40, 40}, {0.1, 0.9, 0.0}});
    frames.push_back(f);
  }
  const auto tubes = build_offline_tubes(frames, 2, OfflineParams{});
  REQUIRE(tubes.size() == 1);
  CHECK(tubes[0].video == "v");
  CHECK(tubes[0].cls == 1);
  CHECK(tubes[0].start == 2);
  CHECK(tubes[0].end == 7);
  CHECK(tubes[0].score == doctest::Approx(0.9));
}
