#include "actube/labelling.hpp"

#include <stdexcept>

namespace actube {

namespace {

double unary(Label l, double score) { return l == 1 ? score : 1.0 - score; }

}  // namespace

TrellisColumn potts_first(double score) {
  TrellisColumn col;
  col.value = {unary(0, score), unary(1, score)};
  col.back = {0, 0};
  return col;
}

TrellisColumn potts_advance(const TrellisColumn& prev, double score, double switch_cost) {
  TrellisColumn col;
  for (Label l = 0; l < 2; ++l) {
    const double from0 = prev.value[0] - (l == 0 ? 0.0 : switch_cost);
    const double from1 = prev.value[1] - (l == 1 ? 0.0 : switch_cost);
    if (from0 >= from1) {
      col.value[l] = from0 + unary(l, score);
      col.back[l] = 0;
    } else {
      col.value[l] = from1 + unary(l, score);
      col.back[l] = 1;
    }
  }
  return col;
}

Label best_final_label(const TrellisColumn& col) { return col.value[0] >= col.value[1] ? 0 : 1; }

std::vector<Label> potts_labelling(std::span<const double> scores, const PottsParams& params) {
  if (scores.empty()) return {};
  std::vector<TrellisColumn> trellis;
  trellis.reserve(scores.size());
  trellis.push_back(potts_first(scores[0]));
  for (std::size_t t = 1; t < scores.size(); ++t)
    trellis.push_back(potts_advance(trellis.back(), scores[t], params.switch_cost()));

  std::vector<Label> labels(scores.size());
  Label l = best_final_label(trellis.back());
  for (std::size_t t = scores.size(); t-- > 0;) {
    labels[t] = l;
    l = trellis[t].back[l];
  }
  return labels;
}

std::vector<std::pair<int, int>> positive_runs(std::span<const Label> labels) {
  std::vector<std::pair<int, int>> runs;
  int start = -1;
  for (int t = 0; t < static_cast<int>(labels.size()); ++t) {
    if (labels[static_cast<std::size_t>(t)] == 1) {
      if (start < 0) start = t;
    } else if (start >= 0) {
      runs.emplace_back(start, t - 1);
      start = -1;
    }
  }
  if (start >= 0) runs.emplace_back(start, static_cast<int>(labels.size()) - 1);
  return runs;
}

OnlineLabeller::OnlineLabeller(PottsParams params, int lookback) : params_(params), lookback_(lookback) {
  if (lookback < 1) throw std::invalid_argument("OnlineLabeller: lookback must be >= 1");
}

void OnlineLabeller::push(double score) {
  if (size() == 0) {
    window_.push_back(potts_first(score));
  } else {
    window_.push_back(potts_advance(window_.back(), score, params_.switch_cost()));
  }
  if (window_.size() > static_cast<std::size_t>(lookback_)) {
    // The oldest window position is now m steps behind: commit it.
    committed_.push_back(backtrack_window().front());
    window_.pop_front();
  }
}

std::vector<Label> OnlineLabeller::backtrack_window() const {
  std::vector<Label> out(window_.size());
  if (window_.empty()) return out;
  Label l = best_final_label(window_.back());
  for (std::size_t k = window_.size(); k-- > 0;) {
    out[k] = l;
    l = window_[k].back[l];
  }
  return out;
}

std::vector<Label> OnlineLabeller::labels() const {
  std::vector<Label> out = committed_;
  const auto tail = backtrack_window();
  out.insert(out.end(), tail.begin(), tail.end());
  return out;
}

}  // namespace actube
