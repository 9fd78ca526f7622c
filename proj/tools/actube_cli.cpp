// actube: build, predict and evaluate action tubes from line-delimited
// detection streams.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "actube/anchors.hpp"
#include "actube/evaluation.hpp"
#include "actube/fusion.hpp"
#include "actube/future.hpp"
#include "actube/io.hpp"
#include "actube/offline.hpp"
#include "actube/online.hpp"
#include "actube/pipeline.hpp"
#include "actube/sim.hpp"

using namespace actube;

namespace {

struct Common {
  std::optional<std::string> config;
  int threads = 1;
  std::optional<int> classes;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, std::string("JSON run configuration (default: $") + kConfigEnv + ")");
  cmd->add_option("--threads", c.threads, "worker threads; output is identical for any value")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--classes", c.classes, "number of foreground classes (default: inferred)")
      ->check(CLI::NonNegativeNumber);
}

RunConfig load(const Common& c) {
  RunConfig cfg = resolve_run_config(c.config);
  if (c.classes) cfg.num_classes = *c.classes;
  return cfg;
}

template <typename T>
void set_if(const std::optional<T>& v, T& out) {
  if (v) out = *v;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  return out;
}

template <typename Frame>
int infer_classes(int configured, const std::vector<Frame>& frames) {
  if (configured > 0) return configured;
  for (const auto& f : frames) {
    if constexpr (std::is_same_v<Frame, DetectionFrame>) {
      for (const auto& d : f.detections) return static_cast<int>(d.scores.size()) - 1;
    } else {
      for (const auto& m : f.tubes) return static_cast<int>(m.scores.size()) - 1;
    }
  }
  throw IoError("cannot infer the class count from an input without detections; pass --classes");
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void write_csv(const std::optional<std::string>& path, const std::vector<MetricRow>& rows) {
  if (!path) return;
  auto out = open_output(*path);
  write_metric_csv(out, rows);
}

bool is_micro_stream(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      return nlohmann::json::parse(line).contains("mts");
    } catch (const nlohmann::json::exception&) {
      return false;
    }
  }
  return false;
}

std::map<std::string, int> stream_lengths(const std::string& path) {
  std::map<std::string, int> out;
  if (is_micro_stream(path)) {
    for (const auto& s : group_by_video(read_microtubes(path))) out[s.video] = stream_length(s);
  } else {
    for (const auto& s : group_by_video(read_detections(path))) out[s.video] = stream_length(s);
  }
  return out;
}

// simulate

struct SimulateOpts {
  Common common;
  std::uint64_t seed = 0;
  std::optional<int> videos, frames, width, height, min_instances, max_instances, stride;
  std::optional<std::string> motion;
  std::optional<double> vx, vy, sigma_walk, sigma_box, sigma_score, p_miss, fp_rate;
  std::string gt;
  std::optional<std::string> dets, micro, predictions;
  std::optional<int> delta, df, n_future;
};

int run_simulate(const SimulateOpts& o) {
  RunConfig cfg = load(o.common);
  auto& sc = cfg.scenario;
  sc.seed = o.seed;
  if (o.common.classes) sc.num_classes = *o.common.classes;
  set_if(o.videos, sc.videos);
  set_if(o.frames, sc.frames);
  set_if(o.width, sc.width);
  set_if(o.height, sc.height);
  set_if(o.min_instances, sc.min_instances);
  set_if(o.max_instances, sc.max_instances);
  set_if(o.stride, sc.boundary_stride);
  if (o.motion) sc.motion = parse_motion_model(*o.motion);
  set_if(o.vx, sc.vx);
  set_if(o.vy, sc.vy);
  set_if(o.sigma_walk, sc.sigma_walk);
  set_if(o.sigma_box, cfg.noise.sigma_box);
  set_if(o.sigma_score, cfg.noise.sigma_score);
  set_if(o.p_miss, cfg.noise.p_miss);
  set_if(o.fp_rate, cfg.noise.fp_rate);
  set_if(o.delta, cfg.micro.delta);
  set_if(o.df, cfg.micro.delta_f);
  set_if(o.n_future, cfg.micro.n_future);
  if (o.predictions) cfg.micro.predictions = parse_prediction_mode(*o.predictions);
  cfg.micro.delta_p = cfg.micro.delta;
  sc.validate();
  cfg.noise.validate();
  cfg.micro.validate();

  const auto n = static_cast<std::size_t>(sc.videos);
  std::vector<VideoScene> scenes(n);
  std::vector<std::string> det_text(n);
  std::vector<std::string> micro_text(n);
  parallel_for(n, o.common.threads, [&](std::size_t i) {
    scenes[i] = generate_video(sc, static_cast<int>(i));
    if (o.dets) {
      std::ostringstream s;
      write_detections(s, render_frames(sc, scenes[i].info, scenes[i].tubes, cfg.noise));
      det_text[i] = s.str();
    }
    if (o.micro) {
      std::ostringstream s;
      write_microtubes(s, render_microtubes(sc, scenes[i].info, scenes[i].tubes, cfg.noise, cfg.micro));
      micro_text[i] = s.str();
    }
  });

  std::size_t instances = 0;
  {
    auto out = open_output(o.gt);
    for (const auto& s : scenes) {
      write_gt(out, s.tubes);
      instances += s.tubes.size();
    }
  }
  if (o.dets) {
    auto out = open_output(*o.dets);
    for (const auto& t : det_text) out << t;
  }
  if (o.micro) {
    auto out = open_output(*o.micro);
    for (const auto& t : micro_text) out << t;
  }
  std::cout << "simulate videos=" << sc.videos << " instances=" << instances << " classes=" << sc.num_classes
            << " seed=" << sc.seed << "\n";
  return 0;
}

// fuse

struct FuseOpts {
  Common common;
  std::string appearance, flow, out;
  std::optional<std::string> strategy;
  std::optional<double> tau, mean_iou;
  bool l1 = false;
};

int run_fuse(const FuseOpts& o) {
  RunConfig cfg = load(o.common);
  if (o.strategy) cfg.fusion.strategy = parse_fusion_strategy(*o.strategy);
  set_if(o.tau, cfg.fusion.tau);
  set_if(o.mean_iou, cfg.fusion.mean_match_iou);
  if (o.l1) cfg.fusion.l1_normalize = true;
  cfg.fusion.validate();

  const auto app = group_by_video(read_detections(o.appearance, cfg.num_classes));
  const auto flow = group_by_video(read_detections(o.flow, cfg.num_classes));
  std::vector<std::string> videos;
  for (const auto& s : app) videos.push_back(s.video);
  for (const auto& s : flow)
    if (std::find(videos.begin(), videos.end(), s.video) == videos.end()) videos.push_back(s.video);

  const auto find = [](const std::vector<DetectionStream>& streams, const std::string& v) -> const DetectionStream* {
    for (const auto& s : streams)
      if (s.video == v) return &s;
    return nullptr;
  };

  std::vector<std::string> text(videos.size());
  parallel_for(videos.size(), o.common.threads, [&](std::size_t i) {
    std::map<int, DetectionFrame> a;
    std::map<int, DetectionFrame> f;
    if (const auto* s = find(app, videos[i]))
      for (const auto& fr : s->frames) a[fr.t] = fr;
    if (const auto* s = find(flow, videos[i]))
      for (const auto& fr : s->frames) f[fr.t] = fr;
    std::set<int> times;
    for (const auto& [t, fr] : a) times.insert(t);
    for (const auto& [t, fr] : f) times.insert(t);
    std::vector<DetectionFrame> fused;
    for (int t : times) {
      const auto ai = a.find(t);
      const auto fi = f.find(t);
      DetectionFrame out = ai != a.end() ? ai->second : fi->second;
      const std::vector<ScoredBox> none;
      out.detections = fuse(ai != a.end() ? ai->second.detections : none,
                            fi != f.end() ? fi->second.detections : none, cfg.fusion);
      fused.push_back(std::move(out));
    }
    std::ostringstream s;
    write_detections(s, fused);
    text[i] = s.str();
  });
  auto out = open_output(o.out);
  for (const auto& t : text) out << t;
  std::cout << "fuse strategy=" << to_string(cfg.fusion.strategy) << " videos=" << videos.size() << "\n";
  return 0;
}

// build-offline / build-online / link-micro

struct BuildOpts {
  Common common;
  std::string input, out;
};

void emit_tubes(const std::string& path, const std::vector<std::vector<ActionTube>>& per_video,
                const std::string& what) {
  auto out = open_output(path);
  std::size_t n = 0;
  for (const auto& tubes : per_video) {
    write_tubes(out, tubes);
    n += tubes.size();
  }
  std::cout << what << " videos=" << per_video.size() << " tubes=" << n << "\n";
}

int run_build_offline(const BuildOpts& o) {
  RunConfig cfg = load(o.common);
  cfg.offline.path.validate();
  cfg.offline.trim.validate();
  const auto frames = read_detections(o.input, cfg.num_classes);
  const int classes = infer_classes(cfg.num_classes, frames);
  const auto streams = group_by_video(frames);
  std::vector<std::vector<ActionTube>> tubes(streams.size());
  parallel_for(streams.size(), o.common.threads, [&](std::size_t i) {
    tubes[i] = build_offline_tubes(streams[i].frames, classes, cfg.offline);
  });
  emit_tubes(o.out, tubes, "build-offline");
  return 0;
}

int run_build_online(const BuildOpts& o) {
  RunConfig cfg = load(o.common);
  const auto frames = read_detections(o.input, cfg.num_classes);
  const int classes = infer_classes(cfg.num_classes, frames);
  const auto streams = group_by_video(frames);
  std::vector<std::vector<ActionTube>> tubes(streams.size());
  parallel_for(streams.size(), o.common.threads,
               [&](std::size_t i) { tubes[i] = run_online(streams[i], classes, cfg.online); });
  emit_tubes(o.out, tubes, "build-online");
  return 0;
}

int run_link_micro(const BuildOpts& o) {
  RunConfig cfg = load(o.common);
  const auto frames = read_microtubes(o.input, cfg.num_classes);
  const int classes = infer_classes(cfg.num_classes, frames);
  const auto streams = group_by_video(frames);
  std::vector<std::vector<ActionTube>> tubes(streams.size());
  parallel_for(streams.size(), o.common.threads,
               [&](std::size_t i) { tubes[i] = run_micro(streams[i], classes, cfg.online); });
  emit_tubes(o.out, tubes, "link-micro");
  return 0;
}

// estimate-trans / compose-trans

struct EstimateOpts {
  Common common;
  std::string gt, out;
  int delta = 1;
  std::optional<int> width, height;
  double theta = 0.1;
};

int run_estimate_trans(const EstimateOpts& o) {
  RunConfig cfg = load(o.common);
  const int w = o.width.value_or(cfg.scenario.width);
  const int h = o.height.value_or(cfg.scenario.height);
  if (o.delta < 1) throw TransitionError("--delta must be >= 1");
  const auto gts = read_gt(o.gt, cfg.num_classes);
  std::vector<GtMicroTube> pairs;
  for (const auto& g : gts)
    for (int t = g.start; t + o.delta <= g.end; ++t)
      pairs.push_back({g.cls, t, o.delta, g.box_at(t), g.box_at(t + o.delta)});
  const auto pyramid = generate_grids(w, h);
  const auto set = estimate_transitions(pairs, pyramid);
  auto out = open_output(o.out);
  write_transitions(out, set);
  std::size_t nonzero = 0;
  for (const auto& m : set) nonzero += static_cast<std::size_t>(m.probs.nonZeros());
  std::cout << "estimate-trans micro_tubes=" << pairs.size() << " nonzero=" << nonzero
            << " sampled=" << threshold_transitions(set, o.theta).size() << " theta=" << o.theta << "\n";
  return 0;
}

struct ComposeOpts {
  Common common;
  std::string input, out;
  int steps = 1;
  int delta = 1;
  std::optional<std::string> augment;
  double theta = 0.1;
};

int run_compose_trans(const ComposeOpts& o) {
  auto set = read_transitions(o.input, o.delta);
  double dropped = 0.0;
  for (auto& m : set) {
    auto res = compose(m, o.steps);
    for (double d : res.dropped_mass) dropped = std::max(dropped, d);
    m = std::move(res.matrix);
    if (o.augment) m = augment(m, parse_augment_mode(*o.augment), o.theta);
  }
  auto out = open_output(o.out);
  write_transitions(out, set);
  std::cout << "compose-trans steps=" << o.steps << " delta=" << o.delta * o.steps
            << " max_dropped_mass=" << fmt(dropped) << "\n";
  return 0;
}

// predict-future

struct PredictOpts {
  Common common;
  std::string micro, out;
  double fraction = 0.5;
  std::optional<int> velocity_window, width, height;
};

int run_predict_future(const PredictOpts& o) {
  RunConfig cfg = load(o.common);
  set_if(o.velocity_window, cfg.horizon.velocity_window);
  if (!(o.fraction > 0.0 && o.fraction <= 1.0)) throw EvalError("--fraction must be in (0,1]");
  const auto frames = read_microtubes(o.micro, cfg.num_classes);
  const int classes = infer_classes(cfg.num_classes, frames);
  const auto streams = group_by_video(frames);
  std::vector<std::vector<ActionTube>> tubes(streams.size());
  parallel_for(streams.size(), o.common.threads, [&](std::size_t i) {
    HorizonParams hp = cfg.horizon;
    hp.video_length = stream_length(streams[i]);
    hp.width = o.width.value_or(cfg.scenario.width);
    hp.height = o.height.value_or(cfg.scenario.height);
    const int last = observed_frames(o.fraction, hp.video_length) - 1;
    tubes[i] = complete_video(streams[i], classes, cfg.online, hp, last);
  });
  emit_tubes(o.out, tubes, "predict-future fraction=" + fmt(o.fraction));
  return 0;
}

// eval

struct EvalOpts {
  Common common;
  std::string gt;
  std::string tubes;
  std::optional<std::string> stream, csv, averaging;
  std::optional<double> delta;
  double fraction = 0.5;
};

SpatialAveraging averaging_of(const RunConfig& cfg, const EvalOpts& o) {
  if (!o.averaging) return cfg.eval.averaging;
  if (*o.averaging == "intersection") return SpatialAveraging::intersection;
  if (*o.averaging == "gt_duration") return SpatialAveraging::gt_duration;
  throw EvalError("--averaging must be 'intersection' or 'gt_duration'");
}

void per_class_rows(std::vector<MetricRow>& rows, const MapResult& r, const std::string& prefix) {
  for (const auto& [c, ap] : r.per_class) rows.push_back({prefix + ":class" + std::to_string(c), 0.0, ap});
}

int run_eval_map(const EvalOpts& o, const std::string& name) {
  RunConfig cfg = load(o.common);
  set_if(o.delta, cfg.eval.delta);
  cfg.eval.validate();
  const auto avg = averaging_of(cfg, o);
  const auto gts = read_gt(o.gt, cfg.num_classes);
  const auto dets = read_tubes(o.tubes);
  std::vector<MetricRow> rows;
  const bool completion = name == "cmap";
  const auto r = video_map(dets, gts, cfg.eval.delta, avg);
  rows.push_back({name, completion ? o.fraction : cfg.eval.delta, r.mean});
  per_class_rows(rows, r, name);
  write_csv(o.csv, rows);
  std::cout << "metric=" << name << " delta=" << cfg.eval.delta;
  if (completion) std::cout << " fraction=" << o.fraction;
  std::cout << " classes=" << r.per_class.size() << " value=" << fmt(r.mean) << "\n";
  return 0;
}

int run_eval_avg_map(const EvalOpts& o) {
  RunConfig cfg = load(o.common);
  cfg.eval.validate();
  const auto avg = averaging_of(cfg, o);
  const auto gts = read_gt(o.gt, cfg.num_classes);
  const auto dets = read_tubes(o.tubes);
  std::vector<MetricRow> rows;
  double sum = 0.0;
  for (double d : cfg.eval.delta_sweep) {
    const double m = video_map(dets, gts, d, avg).mean;
    rows.push_back({"video-map", d, m});
    sum += m;
  }
  const double value = cfg.eval.delta_sweep.empty() ? 0.0 : sum / static_cast<double>(cfg.eval.delta_sweep.size());
  rows.push_back({"avg-map", 0.0, value});
  write_csv(o.csv, rows);
  std::cout << "metric=avg-map thresholds=" << cfg.eval.delta_sweep.size() << " value=" << fmt(value) << "\n";
  return 0;
}

int run_eval_pmap(const EvalOpts& o) {
  RunConfig cfg = load(o.common);
  set_if(o.delta, cfg.eval.delta);
  cfg.eval.validate();
  if (!o.stream) throw EvalError("pmap needs --stream to know the video lengths");
  if (!(o.fraction > 0.0 && o.fraction <= 1.0)) throw EvalError("--fraction must be in (0,1]");
  const auto avg = averaging_of(cfg, o);
  const auto gts = read_gt(o.gt, cfg.num_classes);
  const auto dets = read_tubes(o.tubes);
  const auto lengths = stream_lengths(*o.stream);
  std::map<std::string, int> last;
  for (const auto& [v, n] : lengths) last[v] = observed_frames(o.fraction, n) - 1;
  const auto r = prediction_map(dets, gts, last, lengths, cfg.eval.delta, avg);
  std::vector<MetricRow> rows{{"pmap", o.fraction, r.mean}};
  per_class_rows(rows, r, "pmap");
  write_csv(o.csv, rows);
  std::cout << "metric=pmap delta=" << cfg.eval.delta << " fraction=" << o.fraction
            << " classes=" << r.per_class.size() << " value=" << fmt(r.mean) << "\n";
  return 0;
}

int run_eval_early(const EvalOpts& o) {
  RunConfig cfg = load(o.common);
  cfg.eval.validate();
  if (!o.stream) throw EvalError("early needs --stream (detections or micro-tubes)");
  const auto gts = read_gt(o.gt, cfg.num_classes);
  const auto labels = video_labels(gts);
  std::map<std::string, std::vector<std::optional<int>>> predicted;
  const auto& fr = cfg.eval.fractions;

  if (is_micro_stream(*o.stream)) {
    const auto frames = read_microtubes(*o.stream, cfg.num_classes);
    const int classes = infer_classes(cfg.num_classes, frames);
    const auto streams = group_by_video(frames);
    std::vector<std::vector<std::optional<int>>> out(streams.size());
    parallel_for(streams.size(), o.common.threads, [&](std::size_t i) {
      out[i] = early_labels(streams[i], classes, cfg.online, fr, stream_length(streams[i]));
    });
    for (std::size_t i = 0; i < streams.size(); ++i) predicted[streams[i].video] = out[i];
  } else {
    const auto frames = read_detections(*o.stream, cfg.num_classes);
    const int classes = infer_classes(cfg.num_classes, frames);
    const auto streams = group_by_video(frames);
    std::vector<std::vector<std::optional<int>>> out(streams.size());
    parallel_for(streams.size(), o.common.threads, [&](std::size_t i) {
      out[i] = early_labels(streams[i], classes, cfg.online, fr, stream_length(streams[i]));
    });
    for (std::size_t i = 0; i < streams.size(); ++i) predicted[streams[i].video] = out[i];
  }

  const auto acc = early_accuracy(predicted, labels, fr.size());
  std::vector<MetricRow> rows;
  for (std::size_t k = 0; k < fr.size(); ++k) rows.push_back({"early-accuracy", fr[k], acc[k]});
  write_csv(o.csv, rows);
  std::cout << "metric=early videos=" << labels.size();
  for (std::size_t k = 0; k < fr.size(); ++k) std::cout << " f" << fmt(fr[k]).substr(0, 4) << "=" << fmt(acc[k]);
  std::cout << "\n";
  return 0;
}

// bench

struct BenchOpts {
  Common common;
  int frames = 500;
  int per_class = 10;
  std::uint64_t seed = 0;
  int classes = 24;
};

int run_bench(const BenchOpts& o) {
  RunConfig cfg = load(o.common);
  const int classes = o.common.classes.value_or(o.classes);
  if (classes < 1 || o.per_class < 1 || o.frames < 1) throw std::invalid_argument("bench sizes must be >= 1");
  SimRng rng(o.seed);
  const double w = 320.0;
  const double h = 240.0;

  // Slowly drifting objects, one set per class, plus fresh clutter each frame.
  struct Track {
    Box box;
    double vx, vy;
  };
  std::vector<Track> tracks;
  for (int i = 0; i < classes * o.per_class; ++i) {
    const double bw = rng.uniform(20.0, 60.0);
    const double bh = rng.uniform(20.0, 60.0);
    const double x = rng.uniform(0.0, w - bw);
    const double y = rng.uniform(0.0, h - bh);
    tracks.push_back({{x, y, x + bw, y + bh}, rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)});
  }
  std::vector<DetectionFrame> frames;
  frames.reserve(static_cast<std::size_t>(o.frames));
  for (int t = 0; t < o.frames; ++t) {
    DetectionFrame f{"bench", t, static_cast<int>(w), static_cast<int>(h), {}};
    for (std::size_t i = 0; i < tracks.size(); ++i) {
      auto& tr = tracks[i];
      tr.box = {tr.box.x_min + tr.vx, tr.box.y_min + tr.vy, tr.box.x_max + tr.vx, tr.box.y_max + tr.vy};
      if (tr.box.x_min < 0.0 || tr.box.x_max > w) tr.vx = -tr.vx;
      if (tr.box.y_min < 0.0 || tr.box.y_max > h) tr.vy = -tr.vy;
      const int cls = static_cast<int>(i) / o.per_class + 1;
      f.detections.push_back({clamp(tr.box, w, h), class_scores(classes, cls, rng.uniform(0.3, 1.0))});
    }
    frames.push_back(std::move(f));
  }

  OnlineLinker linker(classes, cfg.online, "bench");
  const auto t0 = std::chrono::steady_clock::now();
  for (const auto& f : frames) linker.step(f);
  const auto t1 = std::chrono::steady_clock::now();
  const double ms = std::chrono::duration<double, std::milli>(t1 - t0).count() / o.frames;
  std::cout << "bench frames=" << o.frames << " classes=" << classes << " per_class=" << o.per_class
            << " ms_per_frame=" << fmt(ms) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"actube: spatiotemporal action tube construction, prediction and evaluation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "actube 0.1.0");

  int status = 0;

  SimulateOpts sim;
  auto* simulate = app.add_subcommand("simulate", "generate a synthetic scenario and its detection streams");
  add_common(simulate, sim.common);
  simulate->add_option("--seed", sim.seed, "random seed")->required();
  simulate->add_option("--gt", sim.gt, "ground-truth tube output")->required();
  simulate->add_option("--dets", sim.dets, "frame-level detection output");
  simulate->add_option("--micro", sim.micro, "micro-tube output");
  simulate->add_option("--videos", sim.videos);
  simulate->add_option("--frames", sim.frames, "frames per video");
  simulate->add_option("--width", sim.width);
  simulate->add_option("--height", sim.height);
  simulate->add_option("--min-instances", sim.min_instances);
  simulate->add_option("--max-instances", sim.max_instances);
  simulate->add_option("--stride", sim.stride, "instance boundaries fall on multiples of this");
  simulate->add_option("--motion", sim.motion, "static | constant_velocity | random_walk");
  simulate->add_option("--vx", sim.vx);
  simulate->add_option("--vy", sim.vy);
  simulate->add_option("--sigma-walk", sim.sigma_walk);
  simulate->add_option("--sigma-box", sim.sigma_box);
  simulate->add_option("--sigma-score", sim.sigma_score);
  simulate->add_option("--p-miss", sim.p_miss);
  simulate->add_option("--fp-rate", sim.fp_rate);
  simulate->add_option("--delta", sim.delta, "micro-tube stride");
  simulate->add_option("--predictions", sim.predictions, "none | oracle | hold");
  simulate->add_option("--df", sim.df, "future prediction stride");
  simulate->add_option("--n-future", sim.n_future, "future boxes per micro-tube");
  simulate->callback([&] { status = run_simulate(sim); });

  FuseOpts fz;
  auto* fuse_cmd = app.add_subcommand("fuse", "fuse appearance and flow detections");
  add_common(fuse_cmd, fz.common);
  fuse_cmd->add_option("--appearance", fz.appearance)->required();
  fuse_cmd->add_option("--flow", fz.flow)->required();
  fuse_cmd->add_option("--out", fz.out)->required();
  fuse_cmd->add_option("--strategy", fz.strategy, "boost | union | mean");
  fuse_cmd->add_option("--tau", fz.tau);
  fuse_cmd->add_option("--mean-iou", fz.mean_iou);
  fuse_cmd->add_flag("--l1", fz.l1, "L1-normalise boosted score vectors");
  fuse_cmd->callback([&] { status = run_fuse(fz); });

  BuildOpts off;
  auto* offline = app.add_subcommand("build-offline", "two-pass dynamic programming tubes");
  add_common(offline, off.common);
  offline->add_option("--dets", off.input)->required();
  offline->add_option("--out", off.out)->required();
  offline->callback([&] { status = run_build_offline(off); });

  BuildOpts on;
  auto* online = app.add_subcommand("build-online", "incremental tubes from frame-level detections");
  add_common(online, on.common);
  online->add_option("--dets", on.input)->required();
  online->add_option("--out", on.out)->required();
  online->callback([&] { status = run_build_online(on); });

  BuildOpts lm;
  auto* link = app.add_subcommand("link-micro", "incremental tubes from micro-tubes");
  add_common(link, lm.common);
  link->add_option("--micro", lm.input)->required();
  link->add_option("--out", lm.out)->required();
  link->callback([&] { status = run_link_micro(lm); });

  EstimateOpts est;
  auto* estimate = app.add_subcommand("estimate-trans", "anchor transition matrices from ground truth");
  add_common(estimate, est.common);
  estimate->add_option("--gt", est.gt)->required();
  estimate->add_option("--out", est.out)->required();
  estimate->add_option("--delta", est.delta, "frame stride");
  estimate->add_option("--width", est.width);
  estimate->add_option("--height", est.height);
  estimate->add_option("--theta", est.theta, "sampling threshold for the summary");
  estimate->callback([&] { status = run_estimate_trans(est); });

  ComposeOpts comp;
  auto* compose_cmd = app.add_subcommand("compose-trans", "Markov composition and augmentation");
  add_common(compose_cmd, comp.common);
  compose_cmd->add_option("--in", comp.input)->required();
  compose_cmd->add_option("--out", comp.out)->required();
  compose_cmd->add_option("--steps", comp.steps)->check(CLI::PositiveNumber);
  compose_cmd->add_option("--delta", comp.delta, "stride of the input matrices");
  compose_cmd->add_option("--augment", comp.augment, "diagonal | neighbors | relative_offsets");
  compose_cmd->add_option("--theta", comp.theta);
  compose_cmd->callback([&] { status = run_compose_trans(comp); });

  PredictOpts pred;
  auto* predict = app.add_subcommand("predict-future", "complete tubes into the unobserved future");
  add_common(predict, pred.common);
  predict->add_option("--micro", pred.micro)->required();
  predict->add_option("--out", pred.out)->required();
  predict->add_option("--fraction", pred.fraction, "observed fraction of each video");
  predict->add_option("--velocity-window", pred.velocity_window);
  predict->add_option("--width", pred.width);
  predict->add_option("--height", pred.height);
  predict->callback([&] { status = run_predict_future(pred); });

  auto* eval = app.add_subcommand("eval", "evaluation metrics");
  eval->require_subcommand(1);
  std::map<std::string, EvalOpts> eo;
  const auto eval_cmd = [&](const std::string& name, const std::string& help, bool tubes, bool stream) {
    auto& o = eo[name];
    auto* cmd = eval->add_subcommand(name, help);
    add_common(cmd, o.common);
    cmd->add_option("--gt", o.gt)->required();
    if (tubes) cmd->add_option("--tubes", o.tubes)->required();
    if (stream) cmd->add_option("--stream", o.stream, "detection or micro-tube stream (video lengths)");
    cmd->add_option("--delta", o.delta, "ST-IoU threshold");
    cmd->add_option("--fraction", o.fraction, "observation fraction");
    cmd->add_option("--averaging", o.averaging, "intersection | gt_duration");
    cmd->add_option("--csv", o.csv, "CSV output");
    return cmd;
  };
  eval_cmd("map", "video-mAP at one threshold", true, false)->callback([&] {
    status = run_eval_map(eo["map"], "video-map");
  });
  eval_cmd("avg-map", "video-mAP averaged over the threshold sweep", true, false)->callback([&] {
    status = run_eval_avg_map(eo["avg-map"]);
  });
  eval_cmd("cmap", "completion-mAP of completed tubes", true, false)->callback([&] {
    status = run_eval_map(eo["cmap"], "cmap");
  });
  eval_cmd("pmap", "prediction-mAP of the future segments", true, true)->callback([&] {
    status = run_eval_pmap(eo["pmap"]);
  });
  eval_cmd("early", "early label accuracy per observation fraction", false, true)->callback([&] {
    status = run_eval_early(eo["early"]);
  });

  BenchOpts bench;
  auto* bench_cmd = app.add_subcommand("bench", "online tube generation timing");
  add_common(bench_cmd, bench.common);
  bench_cmd->add_option("--frames", bench.frames);
  bench_cmd->add_option("--per-class", bench.per_class, "detections per class per frame");
  bench_cmd->add_option("--seed", bench.seed);
  bench_cmd->callback([&] { status = run_bench(bench); });

  Common cfg_opts;
  auto* config = app.add_subcommand("config", "print the effective configuration");
  add_common(config, cfg_opts);
  config->callback([&] {
    std::cout << dump_run_config(load(cfg_opts));
    status = 0;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "actube: " << e.what() << "\n";
    return 1;
  }
  return status;
}
