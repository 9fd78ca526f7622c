#include <pybind11/eigen.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <sstream>

#include "actube/anchors.hpp"
#include "actube/evaluation.hpp"
#include "actube/fusion.hpp"
#include "actube/io.hpp"
#include "actube/labelling.hpp"
#include "actube/offline.hpp"
#include "actube/online.hpp"
#include "actube/pipeline.hpp"
#include "actube/sim.hpp"

namespace py = pybind11;
using namespace actube;

namespace {

template <typename Stream>
std::vector<ActionTube> per_video(const std::vector<Stream>& streams, int threads,
                                  const std::function<std::vector<ActionTube>(const Stream&)>& build) {
  std::vector<std::vector<ActionTube>> parts(streams.size());
  {
    py::gil_scoped_release release;
    parallel_for(streams.size(), threads, [&](std::size_t i) { parts[i] = build(streams[i]); });
  }
  std::vector<ActionTube> out;
  for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

template <typename Record>
void write_file(const std::string& path, const std::vector<Record>& records,
                void (*writer)(std::ostream&, std::span<const Record>)) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  writer(out, records);
  if (!out) throw IoError("write failed: " + path);
}

std::string box_repr(const Box& b) {
  std::ostringstream os;
  os << "Box(" << b.x_min << ", " << b.y_min << ", " << b.x_max << ", " << b.y_max << ")";
  return os.str();
}

}  // namespace

PYBIND11_MODULE(_actube, m) {
  m.doc() = "Action tube detection: linking, trimming, transitions and evaluation.";

  py::register_exception<GeometryError>(m, "GeometryError", PyExc_ValueError);
  py::register_exception<OfflineError>(m, "OfflineError", PyExc_ValueError);
  py::register_exception<LinkerError>(m, "LinkerError", PyExc_ValueError);
  py::register_exception<TransitionError>(m, "TransitionError", PyExc_ValueError);
  py::register_exception<PredictionError>(m, "PredictionError", PyExc_ValueError);
  py::register_exception<EvalError>(m, "EvalError", PyExc_ValueError);
  py::register_exception<SimError>(m, "SimError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  py::class_<Box>(m, "Box")
      .def(py::init<>())
      .def(py::init<double, double, double, double>(), py::arg("x_min"), py::arg("y_min"), py::arg("x_max"),
           py::arg("y_max"))
      .def_readwrite("x_min", &Box::x_min)
      .def_readwrite("y_min", &Box::y_min)
      .def_readwrite("x_max", &Box::x_max)
      .def_readwrite("y_max", &Box::y_max)
      .def_property_readonly("area", &Box::area)
      .def("valid", &Box::valid)
      .def("to_list", [](const Box& b) { return std::vector<double>{b.x_min, b.y_min, b.x_max, b.y_max}; })
      .def(py::self == py::self)
      .def("__repr__", &box_repr);

  py::class_<ScoredBox>(m, "ScoredBox")
      .def(py::init<Box, std::vector<double>>(), py::arg("box"), py::arg("scores"))
      .def_readwrite("box", &ScoredBox::box)
      .def_readwrite("scores", &ScoredBox::scores)
      .def(py::self == py::self);

  py::class_<DetectionFrame>(m, "DetectionFrame")
      .def(py::init<std::string, int, int, int, std::vector<ScoredBox>>(), py::arg("video"), py::arg("t"),
           py::arg("width"), py::arg("height"), py::arg("detections"))
      .def_readwrite("video", &DetectionFrame::video)
      .def_readwrite("t", &DetectionFrame::t)
      .def_readwrite("width", &DetectionFrame::width)
      .def_readwrite("height", &DetectionFrame::height)
      .def_readwrite("detections", &DetectionFrame::detections)
      .def(py::self == py::self);

  py::class_<PredictionSet>(m, "PredictionSet")
      .def(py::init<>())
      .def_readwrite("anchor_t", &PredictionSet::anchor_t)
      .def_readwrite("delta_p", &PredictionSet::delta_p)
      .def_readwrite("delta_f", &PredictionSet::delta_f)
      .def_readwrite("past", &PredictionSet::past)
      .def_readwrite("future", &PredictionSet::future);

  py::class_<MicroTube>(m, "MicroTube")
      .def(py::init<>())
      .def_readwrite("b1", &MicroTube::b1)
      .def_readwrite("b2", &MicroTube::b2)
      .def_readwrite("scores", &MicroTube::scores)
      .def_readwrite("pred", &MicroTube::pred);

  py::class_<MicroTubeFrame>(m, "MicroTubeFrame")
      .def(py::init<>())
      .def_readwrite("video", &MicroTubeFrame::video)
      .def_readwrite("t", &MicroTubeFrame::t)
      .def_readwrite("delta", &MicroTubeFrame::delta)
      .def_readwrite("tubes", &MicroTubeFrame::tubes);

  py::class_<ActionTube>(m, "ActionTube")
      .def(py::init<>())
      .def_readwrite("video", &ActionTube::video)
      .def_readwrite("cls", &ActionTube::cls)
      .def_readwrite("start", &ActionTube::start)
      .def_readwrite("end", &ActionTube::end)
      .def_readwrite("boxes", &ActionTube::boxes)
      .def_readwrite("box_scores", &ActionTube::box_scores)
      .def_readwrite("score", &ActionTube::score)
      .def("__len__", &ActionTube::length)
      .def("box_at", &ActionTube::box_at, py::arg("t"))
      .def(py::self == py::self);

  py::class_<GtTube>(m, "GtTube")
      .def(py::init<>())
      .def_readwrite("video", &GtTube::video)
      .def_readwrite("cls", &GtTube::cls)
      .def_readwrite("start", &GtTube::start)
      .def_readwrite("end", &GtTube::end)
      .def_readwrite("boxes", &GtTube::boxes)
      .def("box_at", &GtTube::box_at, py::arg("t"))
      .def(py::self == py::self);

  m.def("iou", &iou, py::arg("a"), py::arg("b"));
  m.def("interpolate_pair", &interpolate_pair, py::arg("first"), py::arg("last"), py::arg("delta"));
  m.def("clamp", &clamp, py::arg("box"), py::arg("width"), py::arg("height"));
  m.def(
      "nms",
      [](const std::vector<Box>& boxes, const std::vector<double>& scores, double threshold) {
        return nms_per_class(boxes, scores, threshold);
      },
      py::arg("boxes"), py::arg("scores"), py::arg("threshold"));

  py::class_<FusionParams>(m, "FusionParams")
      .def(py::init<>())
      .def_property(
          "strategy", [](const FusionParams& p) { return std::string(to_string(p.strategy)); },
          [](FusionParams& p, const std::string& s) { p.strategy = parse_fusion_strategy(s); })
      .def_readwrite("tau", &FusionParams::tau)
      .def_readwrite("l1_normalize", &FusionParams::l1_normalize)
      .def_readwrite("mean_match_iou", &FusionParams::mean_match_iou);
  m.def(
      "fuse",
      [](const std::vector<ScoredBox>& appearance, const std::vector<ScoredBox>& flow, const FusionParams& p) {
        return fuse(appearance, flow, p);
      },
      py::arg("appearance"), py::arg("flow"), py::arg("params") = FusionParams{});

  m.def(
      "potts_labelling",
      [](const std::vector<double>& scores, double weight, double alpha) {
        const auto labels = potts_labelling(scores, PottsParams{weight, alpha});
        return std::vector<int>(labels.begin(), labels.end());
      },
      py::arg("scores"), py::arg("weight") = 1.0, py::arg("alpha") = 1.0);

  py::class_<OnlineLabeller>(m, "OnlineLabeller")
      .def(py::init([](double weight, double alpha, int lookback) {
             return OnlineLabeller(PottsParams{weight, alpha}, lookback);
           }),
           py::arg("weight") = 1.0, py::arg("alpha") = 1.0, py::arg("lookback") = 5)
      .def("push", &OnlineLabeller::push, py::arg("score"))
      .def("labels",
           [](const OnlineLabeller& l) {
             const auto v = l.labels();
             return std::vector<int>(v.begin(), v.end());
           })
      .def_property_readonly("committed",
                             [](const OnlineLabeller& l) {
                               const auto& v = l.committed();
                               return std::vector<int>(v.begin(), v.end());
                             })
      .def("__len__", &OnlineLabeller::size);

  py::class_<PathParams>(m, "PathParams")
      .def(py::init<>())
      .def_readwrite("lambda_o", &PathParams::lambda_o)
      .def_readwrite("max_paths", &PathParams::max_paths)
      .def_readwrite("min_mean_score", &PathParams::min_mean_score);
  py::class_<TrimParams>(m, "TrimParams")
      .def(py::init<>())
      .def_readwrite("lambda_l", &TrimParams::lambda_l)
      .def_readwrite("default_alpha", &TrimParams::default_alpha)
      .def_readwrite("alpha", &TrimParams::alpha)
      .def_readwrite("top_k", &TrimParams::top_k);
  py::class_<OfflineParams>(m, "OfflineParams")
      .def(py::init<>())
      .def_readwrite("path", &OfflineParams::path)
      .def_readwrite("trim", &OfflineParams::trim)
      .def_readwrite("nms_threshold", &OfflineParams::nms_threshold)
      .def_readwrite("top_n", &OfflineParams::top_n)
      .def_readwrite("min_score", &OfflineParams::min_score);

  py::class_<OnlineParams>(m, "OnlineParams")
      .def(py::init<>())
      .def_readwrite("lambda_", &OnlineParams::lambda)
      .def_readwrite("n", &OnlineParams::n)
      .def_readwrite("k_terminate", &OnlineParams::k_terminate)
      .def_readwrite("m", &OnlineParams::m)
      .def_readwrite("nms_threshold", &OnlineParams::nms_threshold)
      .def_readwrite("min_score", &OnlineParams::min_score)
      .def_readwrite("label_weight", &OnlineParams::label_weight)
      .def_readwrite("default_alpha", &OnlineParams::default_alpha)
      .def_readwrite("alpha", &OnlineParams::alpha)
      .def_readwrite("min_tube_length", &OnlineParams::min_tube_length);

  m.def(
      "build_offline",
      [](std::vector<DetectionFrame> frames, int num_classes, const OfflineParams& params, int threads) {
        return per_video<DetectionStream>(group_by_video(std::move(frames)), threads, [&](const DetectionStream& s) {
          return build_offline_tubes(s.frames, num_classes, params);
        });
      },
      py::arg("frames"), py::arg("num_classes"), py::arg("params") = OfflineParams{}, py::arg("threads") = 1);
  m.def(
      "build_online",
      [](std::vector<DetectionFrame> frames, int num_classes, const OnlineParams& params, int threads) {
        return per_video<DetectionStream>(group_by_video(std::move(frames)), threads,
                                          [&](const DetectionStream& s) { return run_online(s, num_classes, params); });
      },
      py::arg("frames"), py::arg("num_classes"), py::arg("params") = OnlineParams{}, py::arg("threads") = 1);
  m.def(
      "link_micro",
      [](std::vector<MicroTubeFrame> frames, int num_classes, const OnlineParams& params, int threads) {
        return per_video<MicroTubeStream>(group_by_video(std::move(frames)), threads,
                                          [&](const MicroTubeStream& s) { return run_micro(s, num_classes, params); });
      },
      py::arg("frames"), py::arg("num_classes"), py::arg("params") = OnlineParams{}, py::arg("threads") = 1);

  py::class_<AnchorGrid>(m, "AnchorGrid")
      .def_readonly("level", &AnchorGrid::level)
      .def_readonly("side", &AnchorGrid::side)
      .def_readonly("slots", &AnchorGrid::slots)
      .def_readonly("anchors", &AnchorGrid::anchors);
  m.def("generate_grids", &generate_grids, py::arg("width"), py::arg("height"));

  py::class_<TransitionMatrix>(m, "TransitionMatrix")
      .def_readonly("level", &TransitionMatrix::level)
      .def_readonly("side", &TransitionMatrix::side)
      .def_readonly("delta", &TransitionMatrix::delta)
      .def("at", &TransitionMatrix::at, py::arg("i"), py::arg("j"))
      .def("row_sum", &TransitionMatrix::row_sum, py::arg("i"))
      .def("dense", [](const TransitionMatrix& t) { return Eigen::MatrixXd(t.probs); });
  m.def(
      "estimate_transitions",
      [](const std::vector<GtTube>& gts, int delta, double width, double height) {
        std::vector<GtMicroTube> pairs;
        for (const auto& g : gts)
          for (int t = g.start; t + delta <= g.end; ++t) pairs.push_back({g.cls, t, delta, g.box_at(t), g.box_at(t + delta)});
        return estimate_transitions(pairs, generate_grids(width, height));
      },
      py::arg("gts"), py::arg("delta"), py::arg("width"), py::arg("height"));
  m.def(
      "compose", [](const TransitionMatrix& t, int steps) { return compose(t, steps).matrix; }, py::arg("matrix"),
      py::arg("steps"));
  m.def("identity_transitions", &identity_transitions, py::arg("delta") = 1);
  m.def(
      "threshold_transitions",
      [](const TransitionMatrix& t, double theta) {
        std::vector<std::tuple<int, int, int>> out;
        for (const auto& c : threshold_transitions(t, theta)) out.emplace_back(c.level, c.i, c.j);
        return out;
      },
      py::arg("matrix"), py::arg("theta"));

  m.def("st_iou", [](const ActionTube& d, const GtTube& g) { return st_iou(d, g); }, py::arg("det"), py::arg("gt"));
  m.def(
      "video_map",
      [](const std::vector<ActionTube>& dets, const std::vector<GtTube>& gts, double delta) {
        const auto r = video_map(dets, gts, delta);
        return py::make_tuple(r.mean, r.per_class);
      },
      py::arg("dets"), py::arg("gts"), py::arg("delta") = 0.5);
  m.def(
      "avg_map",
      [](const std::vector<ActionTube>& dets, const std::vector<GtTube>& gts, std::vector<double> sweep) {
        return avg_map(dets, gts, sweep);
      },
      py::arg("dets"), py::arg("gts"), py::arg("sweep") = EvalConfig::default_sweep());
  m.def("observed_frames", &observed_frames, py::arg("fraction"), py::arg("length"));

  py::class_<ScenarioConfig>(m, "ScenarioConfig")
      .def(py::init<>())
      .def_readwrite("seed", &ScenarioConfig::seed)
      .def_readwrite("videos", &ScenarioConfig::videos)
      .def_readwrite("frames", &ScenarioConfig::frames)
      .def_readwrite("width", &ScenarioConfig::width)
      .def_readwrite("height", &ScenarioConfig::height)
      .def_readwrite("num_classes", &ScenarioConfig::num_classes)
      .def_readwrite("min_instances", &ScenarioConfig::min_instances)
      .def_readwrite("max_instances", &ScenarioConfig::max_instances)
      .def_property(
          "motion", [](const ScenarioConfig& c) { return std::string(to_string(c.motion)); },
          [](ScenarioConfig& c, const std::string& s) { c.motion = parse_motion_model(s); })
      .def_readwrite("vx", &ScenarioConfig::vx)
      .def_readwrite("vy", &ScenarioConfig::vy)
      .def_readwrite("sigma_walk", &ScenarioConfig::sigma_walk)
      .def_readwrite("min_box", &ScenarioConfig::min_box)
      .def_readwrite("max_box", &ScenarioConfig::max_box)
      .def_readwrite("min_duration", &ScenarioConfig::min_duration)
      .def_readwrite("max_duration", &ScenarioConfig::max_duration)
      .def_readwrite("boundary_stride", &ScenarioConfig::boundary_stride);

  py::class_<NoiseModel>(m, "NoiseModel")
      .def(py::init<>())
      .def_readwrite("sigma_box", &NoiseModel::sigma_box)
      .def_readwrite("sigma_score", &NoiseModel::sigma_score)
      .def_readwrite("p_miss", &NoiseModel::p_miss)
      .def_readwrite("fp_rate", &NoiseModel::fp_rate)
      .def_readwrite("fp_score_min", &NoiseModel::fp_score_min)
      .def_readwrite("fp_score_max", &NoiseModel::fp_score_max);

  py::class_<VideoInfo>(m, "VideoInfo")
      .def_readonly("video", &VideoInfo::video)
      .def_readonly("index", &VideoInfo::index)
      .def_readonly("length", &VideoInfo::length)
      .def_readonly("label", &VideoInfo::label);

  py::class_<Scenario>(m, "Scenario")
      .def_readonly("videos", &Scenario::videos)
      .def_readonly("tubes", &Scenario::tubes)
      .def("tubes_of", &Scenario::tubes_of, py::arg("video"))
      .def(
          "detections",
          [](const Scenario& s, const NoiseModel& noise) {
            std::vector<DetectionFrame> out;
            for (const auto& v : s.videos) {
              const auto f = render_frames(s.config, v, s.tubes_of(v.video), noise);
              out.insert(out.end(), f.begin(), f.end());
            }
            return out;
          },
          py::arg("noise") = NoiseModel{})
      .def(
          "microtubes",
          [](const Scenario& s, int delta, const NoiseModel& noise) {
            MicroRenderParams p;
            p.delta = delta;
            std::vector<MicroTubeFrame> out;
            for (const auto& v : s.videos) {
              const auto f = render_microtubes(s.config, v, s.tubes_of(v.video), noise, p);
              out.insert(out.end(), f.begin(), f.end());
            }
            return out;
          },
          py::arg("delta"), py::arg("noise") = NoiseModel{});
  m.def("generate_scenario", &generate_scenario, py::arg("config"));

  m.def(
      "read_detections", [](const std::string& path) { return read_detections(path); }, py::arg("path"));
  m.def(
      "write_detections",
      [](const std::string& path, const std::vector<DetectionFrame>& frames) {
        write_file<DetectionFrame>(path, frames, &write_detections);
      },
      py::arg("path"), py::arg("frames"));
  m.def(
      "read_tubes", [](const std::string& path) { return read_tubes(path); }, py::arg("path"));
  m.def(
      "write_tubes",
      [](const std::string& path, const std::vector<ActionTube>& tubes) {
        write_file<ActionTube>(path, tubes, &write_tubes);
      },
      py::arg("path"), py::arg("tubes"));
  m.def(
      "read_gt", [](const std::string& path) { return read_gt(path); }, py::arg("path"));
}
