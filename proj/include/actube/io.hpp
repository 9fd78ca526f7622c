#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "actube/anchors.hpp"
#include "actube/evaluation.hpp"
#include "actube/fusion.hpp"
#include "actube/future.hpp"
#include "actube/geometry.hpp"
#include "actube/microtube.hpp"
#include "actube/offline.hpp"
#include "actube/online.hpp"
#include "actube/sim.hpp"
#include "actube/tube.hpp"

namespace actube {

// Line-delimited JSON records, one per line:
//   detections  {"video","t","w","h","dets":[{"box":[x1,y1,x2,y2],"scores":[...]}]}
//   microtubes  {"video","t","delta","mts":[{"b1","b2","scores","pred":{"past","df","future"}}]}
//   tubes       {"video","class","score","start","end","boxes":[...]}
//   gt          tubes without "score"
//   transitions {"level","i","j","p"}
// Readers reject malformed records and unknown keys, reporting the line.
// Blank lines are skipped.

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Streaming detection reader. Boxes are clamped to the frame; frame indices
/// must increase strictly within each video. With num_classes = 0 the class
/// count is taken from the first detection and enforced afterwards.
class DetectionReader {
 public:
  DetectionReader(std::istream& in, std::string source, int num_classes = 0);

  bool next(DetectionFrame& frame);
  int num_classes() const { return num_classes_; }

 private:
  std::istream& in_;
  std::string source_;
  int num_classes_;
  long line_ = 0;
  std::vector<std::pair<std::string, int>> last_t_;
};

std::vector<DetectionFrame> read_detections(std::istream& in, const std::string& source, int num_classes = 0);
std::vector<DetectionFrame> read_detections(const std::string& path, int num_classes = 0);
void write_detections(std::ostream& out, std::span<const DetectionFrame> frames);

/// Prediction anchors are the record's t; the past stride is the record's delta.
std::vector<MicroTubeFrame> read_microtubes(std::istream& in, const std::string& source, int num_classes = 0);
std::vector<MicroTubeFrame> read_microtubes(const std::string& path, int num_classes = 0);
void write_microtubes(std::ostream& out, std::span<const MicroTubeFrame> frames);

/// Per-box scores are not stored; reading fills them with the tube score.
std::vector<ActionTube> read_tubes(std::istream& in, const std::string& source);
std::vector<ActionTube> read_tubes(const std::string& path);
void write_tubes(std::ostream& out, std::span<const ActionTube> tubes);

/// Class ids must lie in [1, num_classes] when num_classes > 0.
std::vector<GtTube> read_gt(std::istream& in, const std::string& source, int num_classes = 0);
std::vector<GtTube> read_gt(const std::string& path, int num_classes = 0);
void write_gt(std::ostream& out, std::span<const GtTube> tubes);

/// Levels without records come back as empty matrices.
TransitionSet read_transitions(std::istream& in, const std::string& source, int delta = 1);
TransitionSet read_transitions(const std::string& path, int delta = 1);
void write_transitions(std::ostream& out, const TransitionSet& set);

struct MetricRow {
  std::string metric;
  /// Observation fraction, threshold or class id, depending on the metric.
  double key = 0.0;
  double value = 0.0;
};

/// CSV with header "fraction,metric,value".
void write_metric_csv(std::ostream& out, std::span<const MetricRow> rows);

/// Every tunable parameter, pre-filled with the defaults.
struct RunConfig {
  /// Foreground class count; 0 means "infer from the input".
  int num_classes = 0;
  FusionParams fusion;
  OfflineParams offline;
  OnlineParams online;
  HorizonParams horizon;
  EvalConfig eval;
  ScenarioConfig scenario;
  NoiseModel noise;
  MicroRenderParams micro;

  void validate() const;
};

/// Overlays a JSON object of sections onto the defaults.
RunConfig parse_run_config(const std::string& text, const std::string& source = "<config>");
RunConfig load_run_config(const std::string& path);
std::string dump_run_config(const RunConfig& config);

/// Name of the environment variable holding the default config path.
inline constexpr const char* kConfigEnv = "ACTUBE_CONFIG";

/// The explicit path if given, else $ACTUBE_CONFIG, else defaults.
RunConfig resolve_run_config(const std::optional<std::string>& path);

}  // namespace actube
