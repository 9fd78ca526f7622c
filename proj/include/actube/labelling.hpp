#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <span>
#include <utility>
#include <vector>

namespace actube {

// Binary temporal labelling under a Potts smoothness prior.
//
// Label 1 is the action class, label 0 is background. The unary for a score s
// is s under label 1 and 1 - s under label 0; each label switch between
// neighbours costs weight * alpha. The maximiser is unique up to ties, which
// always resolve towards background: both for the final label and for every
// back-pointer.

using Label = std::uint8_t;

struct PottsParams {
  double weight = 1.0;
  double alpha = 1.0;

  double switch_cost() const { return weight * alpha; }

  friend bool operator==(const PottsParams&, const PottsParams&) = default;
};

/// One column of the Viterbi trellis.
struct TrellisColumn {
  std::array<double, 2> value{};
  std::array<Label, 2> back{};

  friend bool operator==(const TrellisColumn&, const TrellisColumn&) = default;
};

TrellisColumn potts_first(double score);
TrellisColumn potts_advance(const TrellisColumn& prev, double score, double switch_cost);
Label best_final_label(const TrellisColumn& col);

/// Exact maximiser over all 2^T labellings (linear-time Viterbi).
std::vector<Label> potts_labelling(std::span<const double> scores, const PottsParams& params);

/// Maximal runs of label 1 as inclusive [first, last] index pairs.
std::vector<std::pair<int, int>> positive_runs(std::span<const Label> labels);

/// Incremental Viterbi that keeps back-pointers for only the last `lookback`
/// positions. Older positions are committed by back-tracking from the current
/// best state and never change afterwards.
class OnlineLabeller {
 public:
  OnlineLabeller() = default;
  OnlineLabeller(PottsParams params, int lookback);

  void push(double score);

  /// Committed labels followed by the provisional back-path of the window.
  std::vector<Label> labels() const;

  std::size_t size() const { return committed_.size() + window_.size(); }
  std::size_t committed_size() const { return committed_.size(); }
  const std::vector<Label>& committed() const { return committed_; }
  int lookback() const { return lookback_; }

  friend bool operator==(const OnlineLabeller&, const OnlineLabeller&) = default;

 private:
  std::vector<Label> backtrack_window() const;

  PottsParams params_{};
  int lookback_ = 5;
  std::vector<Label> committed_;
  std::deque<TrellisColumn> window_;
};

}  // namespace actube
