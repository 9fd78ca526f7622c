#include "actube/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

namespace actube {

FusionStrategy parse_fusion_strategy(std::string_view name) {
  if (name == "boost") return FusionStrategy::boost;
  if (name == "union") return FusionStrategy::union_set;
  if (name == "mean") return FusionStrategy::mean;
  throw std::invalid_argument("unknown fusion strategy: " + std::string(name));
}

std::string_view to_string(FusionStrategy s) {
  switch (s) {
    case FusionStrategy::boost: return "boost";
    case FusionStrategy::union_set: return "union";
    case FusionStrategy::mean: return "mean";
  }
  return "boost";
}

void FusionParams::validate() const {
  if (!(tau >= 0.0 && tau <= 1.0)) throw std::invalid_argument("fusion.tau must be in [0,1]");
  if (!(mean_match_iou >= 0.0 && mean_match_iou <= 1.0))
    throw std::invalid_argument("fusion.mean_match_iou must be in [0,1]");
}

namespace {

void l1_normalize(std::vector<double>& scores) {
  double norm = 0.0;
  for (double s : scores) norm += std::abs(s);
  if (norm <= 0.0) return;
  for (double& s : scores) s /= norm;
}

}  // namespace

std::vector<ScoredBox> boost_fuse(std::span<const ScoredBox> appearance, std::span<const ScoredBox> flow,
                                  const FusionParams& params) {
  std::vector<ScoredBox> out(appearance.begin(), appearance.end());
  std::vector<bool> flow_matched(flow.size(), false);

  for (auto& det : out) {
    double best = -1.0;
    std::size_t best_j = 0;
    for (std::size_t j = 0; j < flow.size(); ++j) {
      const double o = iou(det.box, flow[j].box);
      if (o > best) {
        best = o;
        best_j = j;
      }
    }
    if (flow.empty() || best < params.tau) continue;
    const auto& f = flow[best_j];
    const std::size_t n = std::min(det.scores.size(), f.scores.size());
    for (std::size_t c = 1; c < n; ++c) det.scores[c] += f.scores[c] * best;
  }

  for (std::size_t j = 0; j < flow.size(); ++j) {
    for (const auto& a : appearance) {
      if (iou(a.box, flow[j].box) >= params.tau) {
        flow_matched[j] = true;
        break;
      }
    }
    if (!flow_matched[j]) out.push_back(flow[j]);
  }

  if (params.l1_normalize) {
    for (auto& det : out) l1_normalize(det.scores);
  }
  return out;
}

std::vector<ScoredBox> union_fuse(std::span<const ScoredBox> appearance, std::span<const ScoredBox> flow) {
  std::vector<ScoredBox> out;
  out.reserve(appearance.size() + flow.size());
  out.insert(out.end(), appearance.begin(), appearance.end());
  out.insert(out.end(), flow.begin(), flow.end());
  return out;
}

std::vector<ScoredBox> mean_fuse(std::span<const ScoredBox> appearance, std::span<const ScoredBox> flow,
                                 const FusionParams& params) {
  struct Pair {
    double overlap;
    std::size_t a;
    std::size_t f;
  };
  std::vector<Pair> pairs;
  for (std::size_t a = 0; a < appearance.size(); ++a) {
    for (std::size_t f = 0; f < flow.size(); ++f) {
      const double o = iou(appearance[a].box, flow[f].box);
      if (o >= params.mean_match_iou && o > 0.0) pairs.push_back({o, a, f});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& l, const Pair& r) {
    return std::tie(r.overlap, l.a, l.f) < std::tie(l.overlap, r.a, r.f);
  });

  std::vector<long> partner(appearance.size(), -1);
  std::vector<bool> flow_used(flow.size(), false);
  for (const auto& p : pairs) {
    if (partner[p.a] >= 0 || flow_used[p.f]) continue;
    partner[p.a] = static_cast<long>(p.f);
    flow_used[p.f] = true;
  }

  std::vector<ScoredBox> out;
  out.reserve(appearance.size() + flow.size());
  for (std::size_t a = 0; a < appearance.size(); ++a) {
    if (partner[a] < 0) {
      out.push_back(appearance[a]);
      continue;
    }
    const auto& x = appearance[a];
    const auto& y = flow[static_cast<std::size_t>(partner[a])];
    ScoredBox m;
    m.box = {(x.box.x_min + y.box.x_min) / 2.0, (x.box.y_min + y.box.y_min) / 2.0,
             (x.box.x_max + y.box.x_max) / 2.0, (x.box.y_max + y.box.y_max) / 2.0};
    const std::size_t n = std::max(x.scores.size(), y.scores.size());
    m.scores.resize(n, 0.0);
    for (std::size_t c = 0; c < n; ++c) {
      const double sx = c < x.scores.size() ? x.scores[c] : 0.0;
      const double sy = c < y.scores.size() ? y.scores[c] : 0.0;
      m.scores[c] = (sx + sy) / 2.0;
    }
    out.push_back(std::move(m));
  }
  for (std::size_t f = 0; f < flow.size(); ++f) {
    if (!flow_used[f]) out.push_back(flow[f]);
  }
  return out;
}

std::vector<ScoredBox> fuse(std::span<const ScoredBox> appearance, std::span<const ScoredBox> flow,
                            const FusionParams& params) {
  switch (params.strategy) {
    case FusionStrategy::boost: return boost_fuse(appearance, flow, params);
    case FusionStrategy::union_set: return union_fuse(appearance, flow);
    case FusionStrategy::mean: return mean_fuse(appearance, flow, params);
  }
  return union_fuse(appearance, flow);
}

}  // namespace actube
