#include <doctest.h>

#include "actube/evaluation.hpp"

using namespace actube;

namespace {

ActionTube det(const std::string& video, int cls, double score, int start, int end, double x = 0.0) {
  ActionTube t;
  t.video = video;
  t.cls = cls;
  t.start = start;
  t.end = end;
  for (int f = start; f <= end; ++f) {
    t.boxes.push_back({x, 0, x + 10, 10});
    t.box_scores.push_back(score);
  }
  t.score = score;
  return t;
}

GtTube gt(const std::string& video, int cls, int start, int end, double x = 0.0) {
  GtTube g{video, cls, start, end, {}};
  for (int f = start; f <= end; ++f) g.boxes.push_back({x, 0, x + 10, 10});
  return g;
}

}  // namespace

TEST_CASE("temporal and spatio-temporal IoU") {
  CHECK(temporal_iou(0, 9, 0, 9) == 1.0);
  CHECK(temporal_iou(0, 9, 5, 14) == doctest::Approx(5.0 / 15.0));
  CHECK(temporal_iou(0, 4, 5, 9) == 0.0);

  const auto d = det("v", 1, 0.5, 0, 9, 5.0);
  const auto g = gt("v", 1, 0, 9);
  CHECK(st_iou(d, g) == doctest::Approx(50.0 / 150.0));
  const auto half = det("v", 1, 0.5, 5, 9);
  CHECK(st_iou(half, g) == doctest::Approx(0.5));
  CHECK(st_iou(half, g, SpatialAveraging::gt_duration) == doctest::Approx(0.25));
  CHECK(st_iou(det("v", 1, 0.5, 20, 30), g) == 0.0);
}

TEST_CASE("class AP: one false positive ranked above one hit") {
  const std::vector<ActionTube> dets{det("v", 1, 0.9, 0, 9, 100.0), det("v", 1, 0.8, 0, 9)};
  const std::vector<GtTube> gts{gt("v", 1, 0, 9)};
  CHECK(class_ap(dets, gts, 0.5) == 0.5);
}

TEST_CASE("class AP edge cases") {
  const std::vector<GtTube> gts{gt("a", 1, 0, 9), gt("b", 1, 0, 9)};
  CHECK(class_ap({}, gts, 0.5) == 0.0);
  const std::vector<ActionTube> perfect{det("a", 1, 0.9, 0, 9), det("b", 1, 0.8, 0, 9)};
  CHECK(class_ap(perfect, {}, 0.5) == 0.0);
  CHECK(class_ap(perfect, gts, 0.5) == 1.0);
  CHECK(class_ap(perfect, gts, 1.0) == 1.0);

  const std::vector<ActionTube> dup{det("a", 1, 0.9, 0, 9), det("a", 1, 0.8, 0, 9)};
  CHECK(class_ap(dup, gts, 0.5) == doctest::Approx(0.5));
  const std::vector<ActionTube> wrong_video{det("c", 1, 0.9, 0, 9)};
  CHECK(class_ap(wrong_video, gts, 0.5) == 0.0);

  // Hit, miss, hit: precision 1, 1/2, 2/3 -> AP = 0.5*1 + 0.5*2/3.
  const std::vector<GtTube> three{gt("a", 1, 0, 9), gt("b", 1, 0, 9)};
  const std::vector<ActionTube> mixed{det("a", 1, 0.9, 0, 9), det("x", 1, 0.8, 0, 9), det("b", 1, 0.7, 0, 9)};
  CHECK(class_ap(mixed, three, 0.5) == doctest::Approx(0.5 + 0.5 * 2.0 / 3.0));
}

TEST_CASE("video mAP averages over ground-truth classes") {
  const std::vector<GtTube> gts{gt("a", 1, 0, 9), gt("b", 2, 0, 9)};
  const std::vector<ActionTube> dets{det("a", 1, 0.9, 0, 9), det("b", 2, 0.9, 0, 9, 100.0),
                                     det("b", 2, 0.5, 0, 9), det("a", 3, 0.9, 0, 9)};
  const auto res = video_map(dets, gts, 0.5);
  CHECK(res.per_class.size() == 2);
  CHECK(res.per_class.at(1) == 1.0);
  CHECK(res.per_class.at(2) == 0.5);
  CHECK(res.mean == doctest::Approx(0.75));
  CHECK_THROWS_AS(video_map(dets, {}, 0.5), EvalError);

  const auto sweep = EvalConfig::default_sweep();
  REQUIRE(sweep.size() == 10);
  CHECK(sweep.back() == doctest::Approx(0.95));
  CHECK(avg_map(dets, gts, sweep) == doctest::Approx(0.75));
  CHECK_THROWS_AS(avg_map(dets, gts, std::vector<double>{}), EvalError);
}

TEST_CASE("observation fractions") {
  CHECK(observed_frames(0.1, 100) == 10);
  CHECK(observed_frames(0.5, 91) == 46);
  CHECK(observed_frames(0.01, 10) == 1);
  CHECK(observed_frames(1.0, 37) == 37);
  CHECK(observed_frames(0.3, 10) == 3);
  const auto f = EvalConfig::default_fractions();
  REQUIRE(f.size() == 10);
  CHECK(f.front() == doctest::Approx(0.1));
  EvalConfig cfg;
  cfg.delta = 0.0;
  CHECK_THROWS_AS(cfg.validate(), EvalError);
}

TEST_CASE("after_frame keeps the future part") {
  const auto d = det("v", 1, 0.5, 2, 9);
  const auto cut = after_frame(d, 4);
  REQUIRE(cut);
  CHECK(cut->start == 5);
  CHECK(cut->boxes.size() == 5);
  CHECK(cut->contiguous());
  CHECK_FALSE(after_frame(d, 9));
  CHECK(after_frame(d, 0)->start == 2);
  const auto g = after_frame(gt("v", 1, 0, 9), 6);
  REQUIRE(g);
  CHECK(g->boxes.size() == 3);
}

TEST_CASE("prediction mAP scores only the unobserved part") {
  const std::vector<GtTube> gts{gt("a", 1, 0, 19), gt("b", 1, 0, 19)};
  // Correct up to frame 9, wrong afterwards.
  ActionTube drift = det("a", 1, 0.9, 0, 19);
  for (int t = 10; t <= 19; ++t) drift.boxes[static_cast<std::size_t>(t)] = {50, 50, 60, 60};
  const std::vector<ActionTube> dets{drift, det("b", 1, 0.8, 0, 19)};
  const std::map<std::string, int> obs{{"a", 9}, {"b", 9}};
  const std::map<std::string, int> len{{"a", 20}, {"b", 20}};
  CHECK(prediction_map(dets, gts, obs, len, 0.5).mean == doctest::Approx(0.25));
  CHECK(completion_map(dets, gts, 0.5).mean == doctest::Approx(1.0));
  const std::map<std::string, int> done{{"a", 19}, {"b", 19}};
  CHECK_THROWS_AS(prediction_map(dets, gts, done, len, 0.5), EvalError);
}

TEST_CASE("early accuracy and video labels") {
  const std::vector<GtTube> gts{gt("a", 2, 0, 9), gt("a", 2, 20, 29), gt("a", 1, 0, 9), gt("b", 3, 0, 9),
                                gt("c", 2, 0, 1), gt("c", 1, 0, 1)};
  const auto labels = video_labels(gts);
  CHECK(labels.at("a") == 2);
  CHECK(labels.at("b") == 3);
  CHECK(labels.at("c") == 1);

  std::map<std::string, std::vector<std::optional<int>>> pred{
      {"a", {1, 2}}, {"b", {std::nullopt, 3}}, {"c", {1, 1}}};
  const auto acc = early_accuracy(pred, labels, 2);
  CHECK(acc[0] == doctest::Approx(1.0 / 3.0));
  CHECK(acc[1] == doctest::Approx(1.0));
  pred.erase("c");
  CHECK(early_accuracy(pred, labels, 2)[1] == doctest::Approx(2.0 / 3.0));
}
