#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include <sys/wait.h>

#include "actube/io.hpp"

using namespace actube;

namespace {

std::string error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const IoError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("detection records round-trip") {
  const std::vector<DetectionFrame> frames{
      {"a", 0, 320, 240, {{{1.5, 2, 30, 40}, {0.25, 0.75}}, {{0, 0, 10, 10}, {0.5, 0.5}}}},
      {"a", 2, 320, 240, {}},
      {"b", 0, 320, 240, {{{5, 5, 6, 6}, {0.0, 1.0}}}},
  };
  std::stringstream ss;
  write_detections(ss, frames);
  const auto text = ss.str();
  CHECK(text.substr(0, 55) == R"({"video":"a","t":0,"w":320,"h":240,"dets":[{"box":[1.5,)");
  const auto back = read_detections(ss, "mem");
  CHECK(back == frames);
}

TEST_CASE("detection reader validates records") {
  const auto read = [](const std::string& s) {
    std::istringstream in(s);
    return read_detections(in, "x.jsonl");
  };
  CHECK(error_of([&] { read("{\"video\":\"a\",\"t\":0,\"w\":10,\"h\":10,\"dets\":[]}\nnot json\n"); })
            .rfind("x.jsonl:2:", 0) == 0);
  CHECK(error_of([&] { read(R"({"video":"a","t":0,"w":10,"h":10,"dets":[],"extra":1})"); })
            .find("unknown key 'extra'") != std::string::npos);
  CHECK(error_of([&] { read(R"({"video":"a","t":0,"w":10,"h":10})"); }).find("missing key 'dets'") !=
        std::string::npos);
  CHECK_FALSE(error_of([&] {
                read("{\"video\":\"a\",\"t\":3,\"w\":10,\"h\":10,\"dets\":[]}\n"
                     "{\"video\":\"a\",\"t\":3,\"w\":10,\"h\":10,\"dets\":[]}\n");
              }).empty());
  CHECK_FALSE(error_of([&] {
                read(R"({"video":"a","t":0,"w":10,"h":10,"dets":[{"box":[5,0,1,1],"scores":[0.5,0.5]}]})");
              }).empty());
  CHECK_FALSE(error_of([&] {
                read("{\"video\":\"a\",\"t\":0,\"w\":10,\"h\":10,\"dets\":[{\"box\":[0,0,1,1],\"scores\":[0.5,0.5]}]}\n"
                     "{\"video\":\"a\",\"t\":1,\"w\":10,\"h\":10,\"dets\":[{\"box\":[0,0,1,1],\"scores\":[0.5,0.3,0.2]}]}");
              }).empty());
  CHECK_FALSE(error_of([&] {
                read(R"({"video":"a","t":0,"w":10,"h":10,"dets":[{"box":[0,0,1,1],"scores":[-0.5,0.5]}]})");
              }).empty());

  const auto clamped = read(R"({"video":"a","t":0,"w":10,"h":10,"dets":[{"box":[-3,0,50,5],"scores":[0.5,0.5]}]})");
  CHECK(clamped[0].detections[0].box == Box{0, 0, 10, 5});
  CHECK(read("\n\n").empty());
}

TEST_CASE("micro-tube records round-trip with and without predictions") {
  PredictionSet p{6, 3, 2, Box{0, 0, 5, 5}, {{1, 1, 6, 6}, {2, 2, 7, 7}}};
  const std::vector<MicroTubeFrame> frames{
      {"v", 6, 3, {{{0, 0, 10, 10}, {3, 0, 13, 10}, {0.1, 0.9}, p}, {{20, 20, 30, 30}, {20, 20, 30, 30}, {0.6, 0.4}, std::nullopt}}},
      {"v", 9, 3, {}},
  };
  std::stringstream ss;
  write_microtubes(ss, frames);
  CHECK(ss.str().find(R"("pred":{"past":[0.0,0.0,5.0,5.0],"df":2,"future")") != std::string::npos);
  const auto back = read_microtubes(ss, "mem");
  CHECK(back == frames);

  std::istringstream null_pred(R"({"video":"v","t":0,"delta":1,"mts":[{"b1":[0,0,1,1],"b2":[0,0,1,1],"scores":[0.5,0.5],"pred":null}]})");
  CHECK_FALSE(read_microtubes(null_pred, "mem")[0].tubes[0].pred);
  std::istringstream bad(R"({"video":"v","t":0,"delta":0,"mts":[]})");
  CHECK_THROWS_AS(read_microtubes(bad, "mem"), IoError);
}

TEST_CASE("tube and ground-truth records") {
  ActionTube t;
  t.video = "v";
  t.cls = 2;
  t.start = 4;
  t.end = 5;
  t.boxes = {{0, 0, 1, 1}, {1, 1, 2, 2}};
  t.box_scores = {0.5, 0.5};
  t.score = 0.5;
  std::stringstream ss;
  write_tubes(ss, std::vector<ActionTube>{t});
  CHECK(ss.str() ==
        "{\"video\":\"v\",\"class\":2,\"score\":0.5,\"start\":4,\"end\":5,\"boxes\":[[0.0,0.0,1.0,1.0],[1.0,1.0,2.0,2.0]]}\n");
  CHECK(read_tubes(ss, "mem") == std::vector<ActionTube>{t});

  const GtTube g{"v", 1, 0, 1, {{0, 0, 1, 1}, {0, 0, 1, 1}}};
  std::stringstream gs;
  write_gt(gs, std::vector<GtTube>{g});
  CHECK(gs.str().find("score") == std::string::npos);
  CHECK(read_gt(gs, "mem") == std::vector<GtTube>{g});

  std::istringstream wrong_count(R"({"video":"v","class":1,"start":0,"end":2,"boxes":[[0,0,1,1]]})");
  CHECK_THROWS_AS(read_gt(wrong_count, "mem"), IoError);
  std::istringstream bad_class(R"({"video":"v","class":4,"start":0,"end":0,"boxes":[[0,0,1,1]]})");
  CHECK_THROWS_AS(read_gt(bad_class, "mem", 3), IoError);
}

TEST_CASE("transition records") {
  auto set = empty_transitions(4);
  set[4].probs.coeffRef(0, 1) = 0.25;
  set[4].probs.coeffRef(0, 0) = 0.75;
  set[5].probs.coeffRef(0, 0) = 1.0;
  std::stringstream ss;
  write_transitions(ss, set);
  CHECK(ss.str() ==
        "{\"level\":5,\"i\":0,\"j\":0,\"p\":0.75}\n{\"level\":5,\"i\":0,\"j\":1,\"p\":0.25}\n"
        "{\"level\":6,\"i\":0,\"j\":0,\"p\":1.0}\n");
  const auto back = read_transitions(ss, "mem", 4);
  REQUIRE(back.size() == 6);
  CHECK(back[0].probs.nonZeros() == 0);
  CHECK(back[4].at(0, 1) == 0.25);
  CHECK(back[4].delta == 4);

  std::istringstream dup("{\"level\":6,\"i\":0,\"j\":0,\"p\":1}\n{\"level\":6,\"i\":0,\"j\":0,\"p\":1}\n");
  CHECK_THROWS_AS(read_transitions(dup, "mem"), IoError);
  std::istringstream outside(R"({"level":6,"i":1,"j":0,"p":1})");
  CHECK_THROWS_AS(read_transitions(outside, "mem"), IoError);
  std::istringstream level(R"({"level":7,"i":0,"j":0,"p":1})");
  CHECK_THROWS_AS(read_transitions(level, "mem"), IoError);
}

TEST_CASE("metric CSV") {
  std::stringstream ss;
  const std::vector<MetricRow> rows{{"early", 0.1, 1.0}, {"video-map", 0.5, 0.25}};
  write_metric_csv(ss, rows);
  CHECK(ss.str().rfind("fraction,metric,value\n", 0) == 0);
  CHECK(ss.str().find("early") != std::string::npos);
}

TEST_CASE("run configuration") {
  const auto c = parse_run_config(R"({"classes":3,"online":{"alpha":2.5,"class_alpha":[0,1,2,3]},
                                      "scenario":{"motion":"cv","frames":91},"eval":{"averaging":"gt_duration"}})");
  CHECK(c.num_classes == 3);
  CHECK(c.online.default_alpha == 2.5);
  CHECK(c.online.alpha_for(3) == 3.0);
  CHECK(c.scenario.motion == MotionModel::constant_velocity);
  CHECK(c.scenario.frames == 91);
  CHECK(c.eval.averaging == SpatialAveraging::gt_duration);
  CHECK(c.online.m == 5);

  const auto again = parse_run_config(dump_run_config(c));
  CHECK(dump_run_config(again) == dump_run_config(c));

  CHECK(error_of([] { parse_run_config(R"({"onlne":{}})", "cfg.json"); }).find("unknown key 'onlne'") !=
        std::string::npos);
  CHECK(error_of([] { parse_run_config(R"({"online":{"lamda":0.2}})"); }).find("online.lamda") != std::string::npos);
  CHECK_THROWS_AS(parse_run_config(R"({"online":{"lambda":3}})"), IoError);
  CHECK_THROWS_AS(parse_run_config(R"({"online":{"n":"ten"}})"), IoError);
  CHECK_THROWS_AS(parse_run_config("[1]"), IoError);
  CHECK_THROWS_AS(load_run_config("/nonexistent/config.json"), IoError);
}

TEST_CASE("configuration path from the environment") {
  const auto dir = std::filesystem::temp_directory_path() / "actube_test_io";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "env.json").string();
  std::ofstream(path) << R"({"online":{"k_terminate":9}})";
  ::setenv(kConfigEnv, path.c_str(), 1);
  CHECK(resolve_run_config(std::nullopt).online.k_terminate == 9);
  const auto other = (dir / "explicit.json").string();
  std::ofstream(other) << R"({"online":{"k_terminate":3}})";
  CHECK(resolve_run_config(other).online.k_terminate == 3);
  ::unsetenv(kConfigEnv);
  CHECK(resolve_run_config(std::nullopt).online.k_terminate == OnlineParams{}.k_terminate);
  std::filesystem::remove_all(dir);
}

#ifdef ACTUBE_CLI_PATH
namespace {

int run(const std::string& args, std::string* output = nullptr) {
  const std::string cmd = std::string(ACTUBE_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[512];
  while (std::fgets(buf, sizeof buf, pipe)) out += buf;
  const int status = ::pclose(pipe);
  if (output) *output = out;
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("command-line tool") {
  const auto dir = std::filesystem::temp_directory_path() / "actube_test_cli";
  std::filesystem::create_directories(dir);
  const auto gt = (dir / "gt.jsonl").string();
  const auto dets = (dir / "dets.jsonl").string();
  const auto tubes = (dir / "tubes.jsonl").string();

  std::string out;
  CHECK(run("simulate --gt " + gt, &out) != 0);
  CHECK(out.find("--seed") != std::string::npos);
  REQUIRE(run("simulate --seed 5 --videos 3 --gt " + gt + " --dets " + dets) == 0);
  CHECK(read_gt(gt).size() >= 3);
  REQUIRE(run("build-online --dets " + dets + " --out " + tubes) == 0);
  REQUIRE(run("eval map --gt " + gt + " --tubes " + tubes + " --delta 0.9", &out) == 0);
  CHECK(out.find("value=1") != std::string::npos);

  const auto cfg = (dir / "cfg.json").string();
  std::ofstream(cfg) << R"({"online":{"m":7}})";
  ::setenv(kConfigEnv, cfg.c_str(), 1);
  REQUIRE(run("config", &out) == 0);
  CHECK(out.find("\"m\": 7") != std::string::npos);
  std::ofstream(cfg) << R"({"online":{"bogus":1}})";
  CHECK(run("config", &out) != 0);
  CHECK(out.find("bogus") != std::string::npos);
  ::unsetenv(kConfigEnv);

  CHECK(run("build-online --dets " + (dir / "missing.jsonl").string() + " --out " + tubes) != 0);
  std::filesystem::remove_all(dir);
}
#endif
