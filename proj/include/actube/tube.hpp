#pragma once

#include <string>
#include <vector>

#include "actube/geometry.hpp"

namespace actube {

/// Class-labelled, temporally contiguous box sequence covering frames
/// [start, end], one box and one score per frame.
struct ActionTube {
  std::string video;
  int cls = 0;
  int start = 0;
  int end = -1;
  std::vector<Box> boxes;
  std::vector<double> box_scores;
  double score = 0.0;

  int length() const { return end - start + 1; }
  bool contains(int t) const { return t >= start && t <= end; }
  const Box& box_at(int t) const { return boxes.at(static_cast<std::size_t>(t - start)); }

  /// start <= end and one box per covered frame.
  bool contiguous() const;

  friend bool operator==(const ActionTube&, const ActionTube&) = default;
};

/// Mean of the k largest values, k = min(top_k, values.size()).
double top_k_mean(const std::vector<double>& values, int top_k);

}  // namespace actube
