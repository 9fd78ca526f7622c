#include "actube/io.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace actube {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

class RecordError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

[[noreturn]] void fail(const std::string& msg) { throw RecordError(msg); }

void only_keys(const json& obj, std::initializer_list<const char*> allowed, const char* what) {
  if (!obj.is_object()) fail(std::string(what) + " must be an object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* k : allowed) known = known || item.key() == k;
    if (!known) fail("unknown key '" + item.key() + "' in " + what);
  }
}

const json& field(const json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) fail(std::string("missing key '") + key + "'");
  return *it;
}

std::string get_string(const json& obj, const char* key) {
  const auto& v = field(obj, key);
  if (!v.is_string()) fail(std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

int get_int(const json& obj, const char* key) {
  const auto& v = field(obj, key);
  if (!v.is_number_integer()) fail(std::string("'") + key + "' must be an integer");
  const auto n = v.get<long long>();
  if (n < -2147483647LL || n > 2147483647LL) fail(std::string("'") + key + "' out of range");
  return static_cast<int>(n);
}

double as_number(const json& v, const std::string& what) {
  if (!v.is_number()) fail(what + " must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(what + " must be finite");
  return d;
}

double get_number(const json& obj, const char* key) { return as_number(field(obj, key), std::string("'") + key + "'"); }

Box parse_box(const json& v, const char* what) {
  if (!v.is_array() || v.size() != 4) fail(std::string(what) + " must be an array of 4 numbers");
  const Box b{as_number(v[0], what), as_number(v[1], what), as_number(v[2], what), as_number(v[3], what)};
  if (!(b.x_min <= b.x_max && b.y_min <= b.y_max)) fail(std::string(what) + " has x_max < x_min or y_max < y_min");
  return b;
}

ojson box_json(const Box& b) { return ojson::array({b.x_min, b.y_min, b.x_max, b.y_max}); }

std::vector<double> parse_scores(const json& v, int& num_classes) {
  if (!v.is_array() || v.size() < 2) fail("'scores' must be an array of at least 2 numbers");
  const int c = static_cast<int>(v.size()) - 1;
  if (num_classes == 0) num_classes = c;
  if (c != num_classes)
    fail("'scores' has " + std::to_string(v.size()) + " entries, expected " + std::to_string(num_classes + 1));
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& s : v) {
    const double d = as_number(s, "score");
    if (d < 0.0) fail("scores must be >= 0");
    out.push_back(d);
  }
  return out;
}

template <typename Fn>
void for_each_record(std::istream& in, const std::string& source, Fn&& fn) {
  std::string line;
  long n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      fn(json::parse(line));
    } catch (const json::exception& e) {
      throw IoError(source + ":" + std::to_string(n) + ": invalid JSON: " + e.what());
    } catch (const RecordError& e) {
      throw IoError(source + ":" + std::to_string(n) + ": " + e.what());
    }
  }
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return in;
}

DetectionFrame parse_detection_record(const json& r, int& num_classes) {
  only_keys(r, {"video", "t", "w", "h", "dets"}, "detection record");
  DetectionFrame f;
  f.video = get_string(r, "video");
  f.t = get_int(r, "t");
  f.width = get_int(r, "w");
  f.height = get_int(r, "h");
  if (f.t < 0) fail("'t' must be >= 0");
  if (f.width <= 0 || f.height <= 0) fail("'w' and 'h' must be > 0");
  const auto& dets = field(r, "dets");
  if (!dets.is_array()) fail("'dets' must be an array");
  for (const auto& d : dets) {
    only_keys(d, {"box", "scores"}, "detection");
    ScoredBox sb;
    sb.box = clamp(parse_box(field(d, "box"), "'box'"), f.width, f.height);
    sb.scores = parse_scores(field(d, "scores"), num_classes);
    f.detections.push_back(std::move(sb));
  }
  return f;
}

template <typename Frame>
void check_order(std::vector<std::pair<std::string, int>>& last, const Frame& f) {
  for (auto& [video, t] : last) {
    if (video != f.video) continue;
    if (f.t <= t) fail("frame " + std::to_string(f.t) + " of " + f.video + " does not follow frame " + std::to_string(t));
    t = f.t;
    return;
  }
  last.emplace_back(f.video, f.t);
}

ojson tube_json(const std::string& video, int cls, std::optional<double> score, int start, int end,
                const std::vector<Box>& boxes) {
  ojson r;
  r["video"] = video;
  r["class"] = cls;
  if (score) r["score"] = *score;
  r["start"] = start;
  r["end"] = end;
  ojson bs = ojson::array();
  for (const auto& b : boxes) bs.push_back(box_json(b));
  r["boxes"] = std::move(bs);
  return r;
}

template <typename Tube>
void parse_tube_common(const json& r, Tube& t) {
  t.video = get_string(r, "video");
  t.cls = get_int(r, "class");
  t.start = get_int(r, "start");
  t.end = get_int(r, "end");
  if (t.start < 0 || t.end < t.start) fail("tube needs 0 <= start <= end");
  const auto& boxes = field(r, "boxes");
  if (!boxes.is_array()) fail("'boxes' must be an array");
  if (boxes.size() != static_cast<std::size_t>(t.end - t.start + 1))
    fail("tube has " + std::to_string(boxes.size()) + " boxes for " + std::to_string(t.end - t.start + 1) + " frames");
  for (const auto& b : boxes) t.boxes.push_back(parse_box(b, "tube box"));
}

std::string dump_line(const ojson& j) { return j.dump(-1, ' ', false, ojson::error_handler_t::strict); }

}  // namespace

DetectionReader::DetectionReader(std::istream& in, std::string source, int num_classes)
    : in_(in), source_(std::move(source)), num_classes_(num_classes) {}

bool DetectionReader::next(DetectionFrame& frame) {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      frame = parse_detection_record(json::parse(line), num_classes_);
      check_order(last_t_, frame);
      return true;
    } catch (const json::exception& e) {
      throw IoError(source_ + ":" + std::to_string(line_) + ": invalid JSON: " + e.what());
    } catch (const RecordError& e) {
      throw IoError(source_ + ":" + std::to_string(line_) + ": " + e.what());
    }
  }
  return false;
}

std::vector<DetectionFrame> read_detections(std::istream& in, const std::string& source, int num_classes) {
  DetectionReader reader(in, source, num_classes);
  std::vector<DetectionFrame> out;
  DetectionFrame f;
  while (reader.next(f)) out.push_back(std::move(f));
  return out;
}

std::vector<DetectionFrame> read_detections(const std::string& path, int num_classes) {
  auto in = open_input(path);
  return read_detections(in, path, num_classes);
}

void write_detections(std::ostream& out, std::span<const DetectionFrame> frames) {
  for (const auto& f : frames) {
    ojson r;
    r["video"] = f.video;
    r["t"] = f.t;
    r["w"] = f.width;
    r["h"] = f.height;
    ojson dets = ojson::array();
    for (const auto& d : f.detections) dets.push_back({{"box", box_json(d.box)}, {"scores", d.scores}});
    r["dets"] = std::move(dets);
    out << dump_line(r) << '\n';
  }
}

std::vector<MicroTubeFrame> read_microtubes(std::istream& in, const std::string& source, int num_classes) {
  std::vector<MicroTubeFrame> out;
  std::vector<std::pair<std::string, int>> last;
  for_each_record(in, source, [&](const json& r) {
    only_keys(r, {"video", "t", "delta", "mts"}, "micro-tube record");
    MicroTubeFrame f;
    f.video = get_string(r, "video");
    f.t = get_int(r, "t");
    f.delta = get_int(r, "delta");
    if (f.t < 0) fail("'t' must be >= 0");
    if (f.delta < 1) fail("'delta' must be >= 1");
    const auto& mts = field(r, "mts");
    if (!mts.is_array()) fail("'mts' must be an array");
    for (const auto& m : mts) {
      only_keys(m, {"b1", "b2", "scores", "pred"}, "micro-tube");
      MicroTube mt;
      mt.b1 = parse_box(field(m, "b1"), "'b1'");
      mt.b2 = parse_box(field(m, "b2"), "'b2'");
      mt.scores = parse_scores(field(m, "scores"), num_classes);
      const auto p = m.find("pred");
      if (p != m.end() && !p->is_null()) {
        only_keys(*p, {"past", "df", "future"}, "'pred'");
        PredictionSet ps;
        ps.anchor_t = f.t;
        ps.delta_p = f.delta;
        ps.delta_f = get_int(*p, "df");
        if (ps.delta_f < 1) fail("'df' must be >= 1");
        const auto& past = field(*p, "past");
        if (!past.is_null()) ps.past = parse_box(past, "'past'");
        const auto& future = field(*p, "future");
        if (!future.is_array()) fail("'future' must be an array");
        for (const auto& b : future) ps.future.push_back(parse_box(b, "future box"));
        mt.pred = std::move(ps);
      }
      f.tubes.push_back(std::move(mt));
    }
    check_order(last, f);
    out.push_back(std::move(f));
  });
  return out;
}

std::vector<MicroTubeFrame> read_microtubes(const std::string& path, int num_classes) {
  auto in = open_input(path);
  return read_microtubes(in, path, num_classes);
}

void write_microtubes(std::ostream& out, std::span<const MicroTubeFrame> frames) {
  for (const auto& f : frames) {
    ojson r;
    r["video"] = f.video;
    r["t"] = f.t;
    r["delta"] = f.delta;
    ojson mts = ojson::array();
    for (const auto& mt : f.tubes) {
      ojson m;
      m["b1"] = box_json(mt.b1);
      m["b2"] = box_json(mt.b2);
      m["scores"] = mt.scores;
      if (mt.pred) {
        ojson p;
        p["past"] = mt.pred->past ? box_json(*mt.pred->past) : ojson(nullptr);
        p["df"] = mt.pred->delta_f;
        ojson fut = ojson::array();
        for (const auto& b : mt.pred->future) fut.push_back(box_json(b));
        p["future"] = std::move(fut);
        m["pred"] = std::move(p);
      }
      mts.push_back(std::move(m));
    }
    r["mts"] = std::move(mts);
    out << dump_line(r) << '\n';
  }
}

std::vector<ActionTube> read_tubes(std::istream& in, const std::string& source) {
  std::vector<ActionTube> out;
  for_each_record(in, source, [&](const json& r) {
    only_keys(r, {"video", "class", "score", "start", "end", "boxes"}, "tube record");
    ActionTube t;
    parse_tube_common(r, t);
    t.score = get_number(r, "score");
    t.box_scores.assign(t.boxes.size(), t.score);
    out.push_back(std::move(t));
  });
  return out;
}

std::vector<ActionTube> read_tubes(const std::string& path) {
  auto in = open_input(path);
  return read_tubes(in, path);
}

void write_tubes(std::ostream& out, std::span<const ActionTube> tubes) {
  for (const auto& t : tubes) {
    out << dump_line(tube_json(t.video, t.cls, t.score, t.start, t.end, t.boxes)) << '\n';
  }
}

std::vector<GtTube> read_gt(std::istream& in, const std::string& source, int num_classes) {
  std::vector<GtTube> out;
  for_each_record(in, source, [&](const json& r) {
    only_keys(r, {"video", "class", "start", "end", "boxes"}, "gt record");
    GtTube t;
    parse_tube_common(r, t);
    if (t.cls < 1 || (num_classes > 0 && t.cls > num_classes))
      fail("class " + std::to_string(t.cls) + " outside 1.." +
           (num_classes > 0 ? std::to_string(num_classes) : std::string("C")));
    out.push_back(std::move(t));
  });
  return out;
}

std::vector<GtTube> read_gt(const std::string& path, int num_classes) {
  auto in = open_input(path);
  return read_gt(in, path, num_classes);
}

void write_gt(std::ostream& out, std::span<const GtTube> tubes) {
  for (const auto& t : tubes) out << dump_line(tube_json(t.video, t.cls, std::nullopt, t.start, t.end, t.boxes)) << '\n';
}

TransitionSet read_transitions(std::istream& in, const std::string& source, int delta) {
  std::vector<std::map<std::pair<int, int>, double>> entries(kPyramidLevels);
  for_each_record(in, source, [&](const json& r) {
    only_keys(r, {"level", "i", "j", "p"}, "transition record");
    const int level = get_int(r, "level");
    if (level < 1 || level > kPyramidLevels) fail("'level' must be in 1..6");
    const int side = kGridSides[static_cast<std::size_t>(level - 1)];
    const int i = get_int(r, "i");
    const int j = get_int(r, "j");
    if (i < 0 || j < 0 || i >= side * side || j >= side * side)
      fail("cell index outside the " + std::to_string(side) + "x" + std::to_string(side) + " grid");
    const double p = get_number(r, "p");
    if (p < 0.0 || p > 1.0) fail("'p' must be in [0,1]");
    if (!entries[static_cast<std::size_t>(level - 1)].emplace(std::make_pair(i, j), p).second)
      fail("duplicate entry");
  });
  TransitionSet set = empty_transitions(delta);
  for (auto& m : set) {
    std::vector<Eigen::Triplet<double>> trips;
    for (const auto& [ij, p] : entries[static_cast<std::size_t>(m.level - 1)]) trips.emplace_back(ij.first, ij.second, p);
    m.probs.setFromTriplets(trips.begin(), trips.end());
    m.probs.makeCompressed();
  }
  return set;
}

TransitionSet read_transitions(const std::string& path, int delta) {
  auto in = open_input(path);
  return read_transitions(in, path, delta);
}

void write_transitions(std::ostream& out, const TransitionSet& set) {
  for (const auto& m : set) {
    for (int i = 0; i < m.probs.outerSize(); ++i) {
      for (SparseRowMatrix::InnerIterator it(m.probs, i); it; ++it) {
        if (it.value() == 0.0) continue;
        ojson r;
        r["level"] = m.level;
        r["i"] = i;
        r["j"] = static_cast<int>(it.col());
        r["p"] = it.value();
        out << dump_line(r) << '\n';
      }
    }
  }
}

void write_metric_csv(std::ostream& out, std::span<const MetricRow> rows) {
  out << "fraction,metric,value\n";
  std::ostringstream line;
  line.precision(17);
  for (const auto& r : rows) {
    line.str({});
    line << r.key << ',' << r.metric << ',' << r.value << '\n';
    out << line.str();
  }
}

// Configuration.

namespace {

class Section {
 public:
  Section(const json& root, const char* name) : name_(name) {
    const auto it = root.find(name);
    if (it == root.end()) return;
    if (!it->is_object()) fail(std::string("section '") + name + "' must be an object");
    obj_ = &*it;
  }

  ~Section() = default;

  void num(const char* key, double& out) {
    if (const auto* v = get(key)) out = as_number(*v, path(key));
  }
  void integer(const char* key, int& out) {
    if (const auto* v = get(key)) {
      if (!v->is_number_integer()) fail(path(key) + " must be an integer");
      out = v->get<int>();
    }
  }
  void seed(const char* key, std::uint64_t& out) {
    if (const auto* v = get(key)) {
      if (!v->is_number_unsigned()) fail(path(key) + " must be a non-negative integer");
      out = v->get<std::uint64_t>();
    }
  }
  void flag(const char* key, bool& out) {
    if (const auto* v = get(key)) {
      if (!v->is_boolean()) fail(path(key) + " must be a boolean");
      out = v->get<bool>();
    }
  }
  void list(const char* key, std::vector<double>& out) {
    if (const auto* v = get(key)) {
      if (!v->is_array()) fail(path(key) + " must be an array");
      out.clear();
      for (const auto& x : *v) out.push_back(as_number(x, path(key)));
    }
  }
  template <typename Parse>
  void text(const char* key, Parse&& parse) {
    if (const auto* v = get(key)) {
      if (!v->is_string()) fail(path(key) + " must be a string");
      parse(v->get<std::string>());
    }
  }

  void finish() const {
    if (!obj_) return;
    for (const auto& item : obj_->items())
      if (!seen_.count(item.key())) fail("unknown key '" + std::string(name_) + "." + item.key() + "'");
  }

 private:
  const json* get(const char* key) {
    seen_.insert(key);
    if (!obj_) return nullptr;
    const auto it = obj_->find(key);
    return it == obj_->end() ? nullptr : &*it;
  }
  std::string path(const char* key) const { return std::string(name_) + "." + key; }

  const char* name_;
  const json* obj_ = nullptr;
  std::set<std::string> seen_;
};

std::string_view averaging_name(SpatialAveraging a) {
  return a == SpatialAveraging::intersection ? "intersection" : "gt_duration";
}

}  // namespace

void RunConfig::validate() const {
  if (num_classes < 0) throw IoError("classes must be >= 0");
  fusion.validate();
  offline.path.validate();
  offline.trim.validate();
  if (!(offline.nms_threshold >= 0.0 && offline.nms_threshold <= 1.0))
    throw IoError("offline.nms_threshold must be in [0,1]");
  if (offline.top_n < 1) throw IoError("offline.top_n must be >= 1");
  online.validate();
  if (horizon.velocity_window < 1) throw IoError("horizon.velocity_window must be >= 1");
  eval.validate();
  scenario.validate();
  noise.validate();
  micro.validate();
}

RunConfig parse_run_config(const std::string& text, const std::string& source) {
  RunConfig c;
  try {
    const auto root = json::parse(text);
    if (!root.is_object()) fail("config must be a JSON object");
    static const std::set<std::string> sections{"classes", "fusion",   "path",  "trim",  "offline", "online",
                                                "horizon", "eval",     "scenario", "noise", "micro"};
    for (const auto& item : root.items())
      if (!sections.count(item.key())) fail("unknown key '" + item.key() + "'");
    if (const auto it = root.find("classes"); it != root.end()) {
      if (!it->is_number_integer()) fail("classes must be an integer");
      c.num_classes = it->get<int>();
    }

    Section fusion(root, "fusion");
    fusion.text("strategy", [&](const std::string& s) { c.fusion.strategy = parse_fusion_strategy(s); });
    fusion.num("tau", c.fusion.tau);
    fusion.flag("l1_normalize", c.fusion.l1_normalize);
    fusion.num("mean_match_iou", c.fusion.mean_match_iou);
    fusion.finish();

    Section path(root, "path");
    path.num("lambda_o", c.offline.path.lambda_o);
    path.integer("max_paths", c.offline.path.max_paths);
    path.num("min_mean_score", c.offline.path.min_mean_score);
    path.finish();

    Section trim(root, "trim");
    trim.num("lambda_l", c.offline.trim.lambda_l);
    trim.num("alpha", c.offline.trim.default_alpha);
    trim.list("class_alpha", c.offline.trim.alpha);
    trim.integer("top_k", c.offline.trim.top_k);
    trim.finish();

    Section offline(root, "offline");
    offline.num("nms_threshold", c.offline.nms_threshold);
    offline.integer("top_n", c.offline.top_n);
    offline.num("min_score", c.offline.min_score);
    offline.finish();

    Section online(root, "online");
    online.num("lambda", c.online.lambda);
    online.integer("n", c.online.n);
    online.integer("k_terminate", c.online.k_terminate);
    online.integer("m", c.online.m);
    online.num("nms_threshold", c.online.nms_threshold);
    online.num("min_score", c.online.min_score);
    online.num("label_weight", c.online.label_weight);
    online.num("alpha", c.online.default_alpha);
    online.list("class_alpha", c.online.alpha);
    online.integer("min_tube_length", c.online.min_tube_length);
    online.finish();

    Section horizon(root, "horizon");
    horizon.integer("velocity_window", c.horizon.velocity_window);
    horizon.finish();

    Section eval(root, "eval");
    eval.num("delta", c.eval.delta);
    eval.list("delta_sweep", c.eval.delta_sweep);
    eval.list("fractions", c.eval.fractions);
    eval.text("averaging", [&](const std::string& s) {
      if (s == "intersection")
        c.eval.averaging = SpatialAveraging::intersection;
      else if (s == "gt_duration")
        c.eval.averaging = SpatialAveraging::gt_duration;
      else
        fail("eval.averaging must be 'intersection' or 'gt_duration'");
    });
    eval.finish();

    Section sc(root, "scenario");
    sc.seed("seed", c.scenario.seed);
    sc.integer("videos", c.scenario.videos);
    sc.integer("frames", c.scenario.frames);
    sc.integer("width", c.scenario.width);
    sc.integer("height", c.scenario.height);
    sc.integer("num_classes", c.scenario.num_classes);
    sc.integer("min_instances", c.scenario.min_instances);
    sc.integer("max_instances", c.scenario.max_instances);
    sc.text("motion", [&](const std::string& s) { c.scenario.motion = parse_motion_model(s); });
    sc.num("vx", c.scenario.vx);
    sc.num("vy", c.scenario.vy);
    sc.num("sigma_walk", c.scenario.sigma_walk);
    sc.num("min_box", c.scenario.min_box);
    sc.num("max_box", c.scenario.max_box);
    sc.num("min_duration", c.scenario.min_duration);
    sc.num("max_duration", c.scenario.max_duration);
    sc.integer("boundary_stride", c.scenario.boundary_stride);
    sc.flag("anchor_first", c.scenario.anchor_first);
    sc.integer("temporal_gap", c.scenario.temporal_gap);
    sc.finish();

    Section noise(root, "noise");
    noise.num("sigma_box", c.noise.sigma_box);
    noise.num("sigma_score", c.noise.sigma_score);
    noise.num("p_miss", c.noise.p_miss);
    noise.num("fp_rate", c.noise.fp_rate);
    noise.num("fp_score_min", c.noise.fp_score_min);
    noise.num("fp_score_max", c.noise.fp_score_max);
    noise.finish();

    Section micro(root, "micro");
    micro.integer("delta", c.micro.delta);
    micro.text("predictions", [&](const std::string& s) { c.micro.predictions = parse_prediction_mode(s); });
    micro.integer("delta_p", c.micro.delta_p);
    micro.integer("delta_f", c.micro.delta_f);
    micro.integer("n_future", c.micro.n_future);
    micro.finish();
  } catch (const json::exception& e) {
    throw IoError(source + ": " + e.what());
  } catch (const RecordError& e) {
    throw IoError(source + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw IoError(source + ": " + e.what());
  }
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw IoError(source + ": " + e.what());
  }
  return c;
}

RunConfig load_run_config(const std::string& path) {
  auto in = open_input(path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str(), path);
}

std::string dump_run_config(const RunConfig& c) {
  const auto prediction_name = [](PredictionMode m) {
    return m == PredictionMode::oracle ? "oracle" : m == PredictionMode::hold ? "hold" : "none";
  };
  json j;
  j["classes"] = c.num_classes;
  j["fusion"] = {{"strategy", std::string(to_string(c.fusion.strategy))},
                 {"tau", c.fusion.tau},
                 {"l1_normalize", c.fusion.l1_normalize},
                 {"mean_match_iou", c.fusion.mean_match_iou}};
  j["path"] = {{"lambda_o", c.offline.path.lambda_o},
               {"max_paths", c.offline.path.max_paths},
               {"min_mean_score", c.offline.path.min_mean_score}};
  j["trim"] = {{"lambda_l", c.offline.trim.lambda_l},
               {"alpha", c.offline.trim.default_alpha},
               {"class_alpha", c.offline.trim.alpha},
               {"top_k", c.offline.trim.top_k}};
  j["offline"] = {{"nms_threshold", c.offline.nms_threshold},
                  {"top_n", c.offline.top_n},
                  {"min_score", c.offline.min_score}};
  j["online"] = {{"lambda", c.online.lambda},
                 {"n", c.online.n},
                 {"k_terminate", c.online.k_terminate},
                 {"m", c.online.m},
                 {"nms_threshold", c.online.nms_threshold},
                 {"min_score", c.online.min_score},
                 {"label_weight", c.online.label_weight},
                 {"alpha", c.online.default_alpha},
                 {"class_alpha", c.online.alpha},
                 {"min_tube_length", c.online.min_tube_length}};
  j["horizon"] = {{"velocity_window", c.horizon.velocity_window}};
  j["eval"] = {{"delta", c.eval.delta},
               {"delta_sweep", c.eval.delta_sweep},
               {"fractions", c.eval.fractions},
               {"averaging", std::string(averaging_name(c.eval.averaging))}};
  j["scenario"] = {{"seed", c.scenario.seed},
                   {"videos", c.scenario.videos},
                   {"frames", c.scenario.frames},
                   {"width", c.scenario.width},
                   {"height", c.scenario.height},
                   {"num_classes", c.scenario.num_classes},
                   {"min_instances", c.scenario.min_instances},
                   {"max_instances", c.scenario.max_instances},
                   {"motion", std::string(to_string(c.scenario.motion))},
                   {"vx", c.scenario.vx},
                   {"vy", c.scenario.vy},
                   {"sigma_walk", c.scenario.sigma_walk},
                   {"min_box", c.scenario.min_box},
                   {"max_box", c.scenario.max_box},
                   {"min_duration", c.scenario.min_duration},
                   {"max_duration", c.scenario.max_duration},
                   {"boundary_stride", c.scenario.boundary_stride},
                   {"anchor_first", c.scenario.anchor_first},
                   {"temporal_gap", c.scenario.temporal_gap}};
  j["noise"] = {{"sigma_box", c.noise.sigma_box},     {"sigma_score", c.noise.sigma_score},
                {"p_miss", c.noise.p_miss},           {"fp_rate", c.noise.fp_rate},
                {"fp_score_min", c.noise.fp_score_min}, {"fp_score_max", c.noise.fp_score_max}};
  j["micro"] = {{"delta", c.micro.delta},
                {"predictions", prediction_name(c.micro.predictions)},
                {"delta_p", c.micro.delta_p},
                {"delta_f", c.micro.delta_f},
                {"n_future", c.micro.n_future}};
  return j.dump(2) + "\n";
}

RunConfig resolve_run_config(const std::optional<std::string>& path) {
  if (path && !path->empty()) return load_run_config(*path);
  if (const char* env = std::getenv(kConfigEnv); env && *env) return load_run_config(env);
  return RunConfig{};
}

}  // namespace actube
