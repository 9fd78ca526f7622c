#include "actube/anchors.hpp"

#include <cmath>
#include <map>
#include <set>
#include <string>

namespace actube {

namespace {

double level_scale(int k) { return 0.1 + 0.8 * static_cast<double>(k) / 5.0; }

SparseRowMatrix from_entries(int n, const std::map<std::pair<int, int>, double>& entries) {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(entries.size());
  for (const auto& [ij, v] : entries) trips.emplace_back(ij.first, ij.second, v);
  SparseRowMatrix m(n, n);
  m.setFromTriplets(trips.begin(), trips.end());
  m.makeCompressed();
  return m;
}

std::map<std::pair<int, int>, double> to_entries(const SparseRowMatrix& m) {
  std::map<std::pair<int, int>, double> out;
  for (int i = 0; i < m.outerSize(); ++i)
    for (SparseRowMatrix::InnerIterator it(m, i); it; ++it) out[{i, static_cast<int>(it.col())}] = it.value();
  return out;
}

TransitionMatrix blank(int level, int delta) {
  TransitionMatrix m;
  m.level = level;
  m.side = kGridSides[static_cast<std::size_t>(level - 1)];
  m.delta = delta;
  m.probs = SparseRowMatrix(m.cells(), m.cells());
  return m;
}

}  // namespace

AnchorPyramid generate_grids(double image_w, double image_h) {
  if (!(image_w > 0.0 && image_h > 0.0)) throw std::invalid_argument("generate_grids: image size must be > 0");
  const double base = std::min(image_w, image_h);
  AnchorPyramid pyramid;
  int offset = 0;
  for (int k = 0; k < kPyramidLevels; ++k) {
    AnchorGrid g;
    g.level = k + 1;
    g.side = kGridSides[static_cast<std::size_t>(k)];
    g.slots = kSlotsPerCell[static_cast<std::size_t>(k)];
    g.offset = offset;

    const double s = level_scale(k);
    const double s_mid = std::sqrt(s * level_scale(k + 1));
    std::vector<std::pair<double, double>> shapes;  // (w, h) as fractions of base
    shapes.emplace_back(s, s);
    for (double a : {2.0, 3.0}) {
      if (a == 3.0 && g.slots < 6) break;
      shapes.emplace_back(s * std::sqrt(a), s / std::sqrt(a));
      shapes.emplace_back(s / std::sqrt(a), s * std::sqrt(a));
    }
    shapes.emplace_back(s_mid, s_mid);

    g.anchors.reserve(static_cast<std::size_t>(g.cells() * g.slots));
    for (int row = 0; row < g.side; ++row) {
      for (int col = 0; col < g.side; ++col) {
        const double cx = (col + 0.5) * image_w / g.side;
        const double cy = (row + 0.5) * image_h / g.side;
        for (const auto& [w, h] : shapes) {
          const double hw = w * base / 2.0;
          const double hh = h * base / 2.0;
          g.anchors.push_back({cx - hw, cy - hh, cx + hw, cy + hh});
        }
      }
    }
    offset += static_cast<int>(g.anchors.size());
    pyramid.push_back(std::move(g));
  }
  return pyramid;
}

std::size_t total_anchors(const AnchorPyramid& pyramid) {
  std::size_t n = 0;
  for (const auto& g : pyramid) n += g.anchors.size();
  return n;
}

AnchorMatch match_gt(const GtMicroTube& gt, const AnchorPyramid& pyramid) {
  AnchorMatch best;
  best.overlap = -1.0;
  for (const auto& g : pyramid) {
    for (int slot = 0; slot < g.slots; ++slot) {
      double best_from = -1.0;
      double best_to = -1.0;
      int cell_from = 0;
      int cell_to = 0;
      for (int cell = 0; cell < g.cells(); ++cell) {
        const auto& a = g.anchor(cell, slot);
        const double of = iou(gt.first, a);
        const double ot = iou(gt.second, a);
        if (of > best_from) {
          best_from = of;
          cell_from = cell;
        }
        if (ot > best_to) {
          best_to = ot;
          cell_to = cell;
        }
      }
      const double overlap = (best_from + best_to) / 2.0;
      if (overlap > best.overlap) {
        best = {g.level, cell_from, cell_to, slot, g.offset + cell_from * g.slots + slot, overlap};
      }
    }
  }
  return best;
}

double TransitionMatrix::row_sum(int i) const {
  double s = 0.0;
  for (SparseRowMatrix::InnerIterator it(probs, i); it; ++it) s += it.value();
  return s;
}

TransitionSet empty_transitions(int delta) {
  TransitionSet set;
  for (int p = 1; p <= kPyramidLevels; ++p) set.push_back(blank(p, delta));
  return set;
}

TransitionSet count_transitions(std::span<const GtMicroTube> gts, const AnchorPyramid& pyramid) {
  if (gts.empty()) throw TransitionError("estimate_transitions: no ground-truth micro-tubes");
  const int delta = gts.front().delta;
  std::vector<std::map<std::pair<int, int>, double>> counts(kPyramidLevels);
  for (const auto& gt : gts) {
    if (gt.delta != delta) throw TransitionError("estimate_transitions: mixed micro-tube strides");
    const auto m = match_gt(gt, pyramid);
    counts[static_cast<std::size_t>(m.level - 1)][{m.cell_from, m.cell_to}] += 1.0;
  }
  TransitionSet set = empty_transitions(delta);
  for (auto& m : set) m.probs = from_entries(m.cells(), counts[static_cast<std::size_t>(m.level - 1)]);
  return set;
}

TransitionMatrix row_normalize(const TransitionMatrix& counts) {
  TransitionMatrix out = counts;
  for (int i = 0; i < out.probs.outerSize(); ++i) {
    const double sum = out.row_sum(i);
    if (sum <= 0.0) continue;
    for (SparseRowMatrix::InnerIterator it(out.probs, i); it; ++it) it.valueRef() /= sum;
  }
  return out;
}

TransitionSet estimate_transitions(std::span<const GtMicroTube> gts, const AnchorPyramid& pyramid) {
  TransitionSet set = count_transitions(gts, pyramid);
  for (auto& m : set) m = row_normalize(m);
  return set;
}

std::vector<CellPair> threshold_transitions(const TransitionMatrix& m, double theta) {
  if (!(theta >= 0.0 && theta <= 1.0)) throw TransitionError("threshold_transitions: theta must be in [0,1]");
  std::vector<CellPair> out;
  for (int i = 0; i < m.probs.outerSize(); ++i)
    for (SparseRowMatrix::InnerIterator it(m.probs, i); it; ++it)
      if (it.value() >= theta && it.value() > 0.0) out.push_back({m.level, i, static_cast<int>(it.col())});
  return out;
}

std::vector<CellPair> threshold_transitions(const TransitionSet& set, double theta) {
  std::vector<CellPair> out;
  for (const auto& m : set) {
    const auto level = threshold_transitions(m, theta);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

TransitionMatrix binarize(const TransitionMatrix& m, double theta) {
  TransitionMatrix out = m;
  std::map<std::pair<int, int>, double> entries;
  for (const auto& p : threshold_transitions(m, theta)) entries[{p.i, p.j}] = 1.0;
  out.probs = from_entries(m.cells(), entries);
  return out;
}

TransitionSet identity_transitions(int delta) {
  TransitionSet set = empty_transitions(delta);
  for (auto& m : set) {
    SparseRowMatrix id(m.cells(), m.cells());
    id.setIdentity();
    m.probs = id;
  }
  return set;
}

AugmentMode parse_augment_mode(std::string_view name) {
  if (name == "diagonal") return AugmentMode::diagonal;
  if (name == "neighbors") return AugmentMode::neighbors;
  if (name == "relative_offsets" || name == "offsets") return AugmentMode::relative_offsets;
  throw TransitionError("unknown augmentation mode: " + std::string(name));
}

TransitionMatrix augment(const TransitionMatrix& m, AugmentMode mode, double theta) {
  auto entries = to_entries(m.probs);
  const int side = m.side;
  const auto inside = [side](int r, int c) { return r >= 0 && r < side && c >= 0 && c < side; };

  switch (mode) {
    case AugmentMode::diagonal:
      for (int i = 0; i < m.cells(); ++i) entries[{i, i}] = 1.0;
      break;
    case AugmentMode::neighbors:
      for (int i = 0; i < m.cells(); ++i) {
        const int r = i / side;
        const int c = i % side;
        for (int dr = -1; dr <= 1; ++dr)
          for (int dc = -1; dc <= 1; ++dc)
            if (inside(r + dr, c + dc)) entries[{i, (r + dr) * side + (c + dc)}] = 1.0;
      }
      break;
    case AugmentMode::relative_offsets: {
      std::set<std::pair<int, int>> offsets;
      for (const auto& p : threshold_transitions(m, theta))
        offsets.insert({p.j / side - p.i / side, p.j % side - p.i % side});
      for (int i = 0; i < m.cells(); ++i) {
        const int r = i / side;
        const int c = i % side;
        for (const auto& [dr, dc] : offsets)
          if (inside(r + dr, c + dc)) entries[{i, (r + dr) * side + (c + dc)}] = 1.0;
      }
      break;
    }
  }
  TransitionMatrix out = m;
  out.probs = from_entries(m.cells(), entries);
  return out;
}

ComposeResult compose(const TransitionMatrix& m, int steps) {
  if (steps < 1) throw TransitionError("compose: steps must be >= 1");
  ComposeResult res;
  res.matrix = m;
  for (int k = 1; k < steps; ++k) {
    SparseRowMatrix next = res.matrix.probs * m.probs;
    next.prune(0.0);
    res.matrix.probs = std::move(next);
  }
  res.matrix.probs.makeCompressed();
  res.matrix.delta = m.delta * steps;
  res.dropped_mass.assign(static_cast<std::size_t>(m.cells()), 0.0);
  for (int i = 0; i < m.cells(); ++i) {
    const double before = m.row_sum(i);
    if (before <= 0.0) continue;
    res.dropped_mass[static_cast<std::size_t>(i)] = std::max(0.0, before - res.matrix.row_sum(i));
  }
  return res;
}

}  // namespace actube
