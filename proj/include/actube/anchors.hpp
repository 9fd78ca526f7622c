#pragma once

#include <array>
#include <span>
#include <stdexcept>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/SparseCore>

#include "actube/geometry.hpp"

namespace actube {

// SSD-style anchor pyramid and cell-to-cell transition matrices.
//
// Level p (1-based) has a side x side grid of cells, each holding
// `slots` anchors of different scale/aspect ratio. Cells are indexed
// row-major; global anchor indices run level by level, cell by cell, slot by
// slot.

inline constexpr int kPyramidLevels = 6;
inline constexpr std::array<int, kPyramidLevels> kGridSides{38, 19, 10, 5, 3, 1};
inline constexpr std::array<int, kPyramidLevels> kSlotsPerCell{4, 6, 6, 6, 4, 4};

struct AnchorGrid {
  int level = 1;
  int side = 1;
  int slots = 4;
  /// Global index of this level's first anchor.
  int offset = 0;
  /// anchors[cell * slots + slot]
  std::vector<Box> anchors;

  int cells() const { return side * side; }
  const Box& anchor(int cell, int slot) const { return anchors[static_cast<std::size_t>(cell * slots + slot)]; }
};

using AnchorPyramid = std::vector<AnchorGrid>;

/// Per-level scale 0.1 + 0.8 (p-1)/5 of min(W,H); aspect ratios {1,2,1/2,s'}
/// for 4 slots and {1,2,1/2,3,1/3,s'} for 6, s' the square of geometric-mean
/// scale with the next level.
AnchorPyramid generate_grids(double image_w, double image_h);

std::size_t total_anchors(const AnchorPyramid& pyramid);

/// Ground-truth box pair on frames t and t + delta.
struct GtMicroTube {
  int cls = 0;
  int t = 0;
  int delta = 1;
  Box first;
  Box second;
};

struct AnchorMatch {
  int level = 1;
  int cell_from = 0;
  int cell_to = 0;
  int slot = 0;
  /// Global index of the anchor at frame t.
  int anchor = 0;
  /// Mean of the two per-frame IoUs.
  double overlap = 0.0;
};

/// Best anchor micro-tube: both anchors on the same level and slot, cells
/// free. Ties resolve to the lowest level, slot, then cell indices.
AnchorMatch match_gt(const GtMicroTube& gt, const AnchorPyramid& pyramid);

using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Cell-to-cell transition probabilities of one pyramid level.
struct TransitionMatrix {
  int level = 1;
  int side = 1;
  int delta = 1;
  SparseRowMatrix probs;

  int cells() const { return side * side; }
  double at(int i, int j) const { return probs.coeff(i, j); }
  double row_sum(int i) const;
};

using TransitionSet = std::vector<TransitionMatrix>;

class TransitionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Empty (all-zero) matrices for every level.
TransitionSet empty_transitions(int delta = 1);

/// Raw match counts, one increment per gt micro-tube.
TransitionSet count_transitions(std::span<const GtMicroTube> gts, const AnchorPyramid& pyramid);

/// Counts with every nonzero row divided by its sum.
TransitionSet estimate_transitions(std::span<const GtMicroTube> gts, const AnchorPyramid& pyramid);

TransitionMatrix row_normalize(const TransitionMatrix& counts);

struct CellPair {
  int level = 1;
  int i = 0;
  int j = 0;

  friend bool operator==(const CellPair&, const CellPair&) = default;
  friend auto operator<=>(const CellPair&, const CellPair&) = default;
};

/// Every (i,j) with probability >= theta, sorted by level, i, j.
std::vector<CellPair> threshold_transitions(const TransitionMatrix& m, double theta);
std::vector<CellPair> threshold_transitions(const TransitionSet& set, double theta);

/// Binary mask of the entries >= theta.
TransitionMatrix binarize(const TransitionMatrix& m, double theta);

TransitionSet identity_transitions(int delta = 1);

enum class AugmentMode { diagonal, neighbors, relative_offsets };

AugmentMode parse_augment_mode(std::string_view name);

/// Sampling-mask augmentation (no re-normalisation).
///  diagonal: every diagonal entry set to 1;
///  neighbors: every cell's 3x3 neighbourhood set to 1;
///  relative_offsets: 2-D cell offsets of entries >= theta replayed from
///  every cell, kept where they land inside the grid.
TransitionMatrix augment(const TransitionMatrix& m, AugmentMode mode, double theta = 0.1);

struct ComposeResult {
  TransitionMatrix matrix;
  /// Per-row probability mass lost by entering all-zero rows.
  std::vector<double> dropped_mass;
};

/// Matrix power m^steps (Markov chain rule for a larger stride).
ComposeResult compose(const TransitionMatrix& m, int steps);

}  // namespace actube
