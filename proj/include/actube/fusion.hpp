#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "actube/geometry.hpp"

namespace actube {

enum class FusionStrategy { boost, union_set, mean };

FusionStrategy parse_fusion_strategy(std::string_view name);
std::string_view to_string(FusionStrategy s);

struct FusionParams {
  FusionStrategy strategy = FusionStrategy::boost;
  double tau = 0.3;
  bool l1_normalize = false;
  double mean_match_iou = 0.5;

  void validate() const;
};

/// Appearance scores boosted by the best-overlapping flow box.
///
/// For each appearance box the flow box with maximum IoU (lowest index on
/// ties) is found; if that IoU >= tau every foreground score becomes
/// s_c + s_c(flow) * IoU. Flow boxes whose IoU with every appearance box is
/// below tau are appended. With `l1_normalize` every output vector is
/// divided by its L1 norm.
std::vector<ScoredBox> boost_fuse(std::span<const ScoredBox> appearance, std::span<const ScoredBox> flow,
                                  const FusionParams& params);

/// Multiset union, appearance boxes first.
std::vector<ScoredBox> union_fuse(std::span<const ScoredBox> appearance, std::span<const ScoredBox> flow);

/// Greedy one-to-one matching by descending pair IoU (pairs below
/// `mean_match_iou` never match). Matched pairs are averaged coordinate-
/// and element-wise; unmatched boxes pass through. Output order: appearance
/// order (fused or not), then unmatched flow boxes in flow order.
std::vector<ScoredBox> mean_fuse(std::span<const ScoredBox> appearance, std::span<const ScoredBox> flow,
                                 const FusionParams& params);

std::vector<ScoredBox> fuse(std::span<const ScoredBox> appearance, std::span<const ScoredBox> flow,
                            const FusionParams& params);

}  // namespace actube
