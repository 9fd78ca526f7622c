#include "actube/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <unordered_map>

namespace actube {

namespace {

template <typename Frame>
std::vector<VideoStream<Frame>> group(std::vector<Frame> frames) {
  std::vector<VideoStream<Frame>> out;
  std::unordered_map<std::string, std::size_t> slot;
  for (auto& f : frames) {
    auto [it, inserted] = slot.try_emplace(f.video, out.size());
    if (inserted) out.push_back({f.video, {}});
    out[it->second].frames.push_back(std::move(f));
  }
  return out;
}

void feed(OnlineLinker& linker, const DetectionFrame& f) { linker.step(f); }
void feed(OnlineLinker& linker, const MicroTubeFrame& f) { linker.link_microtubes(f.t, f.delta, f.tubes); }

int last_frame(const DetectionFrame& f) { return f.t; }
int last_frame(const MicroTubeFrame& f) { return f.t + f.delta; }

template <typename Frame>
std::vector<ActionTube> run(const VideoStream<Frame>& stream, int num_classes, const OnlineParams& params) {
  OnlineLinker linker(num_classes, params, stream.video);
  for (const auto& f : stream.frames) feed(linker, f);
  return linker.finish();
}

template <typename Frame>
std::vector<std::optional<int>> early(const VideoStream<Frame>& stream, int num_classes, const OnlineParams& params,
                                      std::span<const double> fractions, int length) {
  std::vector<std::pair<int, std::size_t>> checkpoints;
  for (std::size_t k = 0; k < fractions.size(); ++k)
    checkpoints.emplace_back(observed_frames(fractions[k], length) - 1, k);
  std::stable_sort(checkpoints.begin(), checkpoints.end());

  std::vector<std::optional<int>> out(fractions.size());
  OnlineLinker linker(num_classes, params, stream.video);
  std::size_t next = 0;
  for (const auto& [boundary, k] : checkpoints) {
    while (next < stream.frames.size() && last_frame(stream.frames[next]) <= boundary) feed(linker, stream.frames[next++]);
    out[k] = linker.predict_label();
  }
  return out;
}

}  // namespace

std::vector<DetectionStream> group_by_video(std::vector<DetectionFrame> frames) { return group(std::move(frames)); }
std::vector<MicroTubeStream> group_by_video(std::vector<MicroTubeFrame> frames) { return group(std::move(frames)); }

int stream_length(const DetectionStream& s) {
  int n = 0;
  for (const auto& f : s.frames) n = std::max(n, last_frame(f) + 1);
  return n;
}

int stream_length(const MicroTubeStream& s) {
  int n = 0;
  for (const auto& f : s.frames) n = std::max(n, last_frame(f) + 1);
  return n;
}

std::vector<ActionTube> run_online(const DetectionStream& stream, int num_classes, const OnlineParams& params) {
  return run(stream, num_classes, params);
}

std::vector<ActionTube> run_micro(const MicroTubeStream& stream, int num_classes, const OnlineParams& params) {
  return run(stream, num_classes, params);
}

std::vector<std::optional<int>> early_labels(const DetectionStream& stream, int num_classes,
                                             const OnlineParams& params, std::span<const double> fractions,
                                             int length) {
  return early(stream, num_classes, params, fractions, length);
}

std::vector<std::optional<int>> early_labels(const MicroTubeStream& stream, int num_classes,
                                             const OnlineParams& params, std::span<const double> fractions,
                                             int length) {
  return early(stream, num_classes, params, fractions, length);
}

std::vector<ActionTube> complete_video(const MicroTubeStream& stream, int num_classes, const OnlineParams& params,
                                       const HorizonParams& horizon, int last_observed) {
  OnlineLinker linker(num_classes, params, stream.video);
  int t_now = -1;
  for (const auto& f : stream.frames) {
    if (last_frame(f) > last_observed) break;
    feed(linker, f);
    t_now = last_frame(f);
  }

  std::vector<ActionTube> out;
  for (int c = 1; c <= num_classes; ++c) {
    for (const auto& tube : linker.terminated(c)) out.push_back(tube.as_tube(stream.video));
    for (const auto& tube : linker.active(c)) {
      if (tube.length() < params.min_tube_length) continue;
      const auto detected = tube.as_tube(stream.video);
      const auto future = assemble_future(detected, tube.predictions, t_now, horizon);
      out.push_back(complete_tube(detected, detected.end + 1, future));
    }
  }
  return out;
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(workers, count); ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace actube
