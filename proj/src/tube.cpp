#include "actube/tube.hpp"

#include <algorithm>
#include <functional>

namespace actube {

bool ActionTube::contiguous() const {
  return start <= end && boxes.size() == static_cast<std::size_t>(length()) &&
         box_scores.size() == boxes.size();
}

double top_k_mean(const std::vector<double>& values, int top_k) {
  if (values.empty() || top_k < 1) return 0.0;
  const auto k = std::min(values.size(), static_cast<std::size_t>(top_k));
  std::vector<double> sorted = values;
  std::partial_sort(sorted.begin(), sorted.begin() + static_cast<long>(k), sorted.end(), std::greater<>());
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += sorted[i];
  return sum / static_cast<double>(k);
}

}  // namespace actube
