#include "crowdc/metrics.hpp"

#include <algorithm>
#include <vector>

#include <fmt/format.h>

namespace crowdc::metrics {

RankingComparison kendall_tau(const ScoreVector& estimated,
                              std::span<const ItemIndex> ground_truth_order) {
  std::vector<ItemIndex> truth(ground_truth_order.begin(), ground_truth_order.end());
  std::sort(truth.begin(), truth.end());
  if (estimated.items() != truth || std::adjacent_find(truth.begin(), truth.end()) != truth.end()) {
    throw CoverageMismatch(
        fmt::format("estimated scores cover {} items, ground truth lists {}", estimated.size(),
                    ground_truth_order.size()));
  }

  // Scores laid out in ground-truth order; a concordant pair is one where the
  // truly better (later) item also scores higher.
  std::vector<double> scores;
  scores.reserve(ground_truth_order.size());
  for (ItemIndex item : ground_truth_order) scores.push_back(estimated.at(item));

  RankingComparison result;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    for (std::size_t j = i + 1; j < scores.size(); ++j) {
      if (scores[j] > scores[i]) {
        ++result.concordant;
      } else if (scores[j] < scores[i]) {
        ++result.discordant;
      }
    }
  }
  result.n_pairs = choose2(static_cast<std::int64_t>(scores.size()));
  if (result.n_pairs > 0) {
    result.tau = static_cast<double>(result.concordant - result.discordant) /
                 static_cast<double>(result.n_pairs);
  }
  return result;
}

double accuracy_ratio(double method_tau, double baseline_tau) {
  if (!(baseline_tau > 0)) {
    throw BaselineNonPositive(fmt::format("baseline tau {} is not positive", baseline_tau));
  }
  return method_tau / baseline_tau;
}

}  // namespace crowdc::metrics
