#pragma once

#include <cstdint>
#include <span>

#include "crowdc/core.hpp"

namespace crowdc::metrics {

class CoverageMismatch : public Error {
 public:
  using Error::Error;
};

class BaselineNonPositive : public Error {
 public:
  using Error::Error;
};

struct RankingComparison {
  double tau = 0;
  std::int64_t concordant = 0;
  std::int64_t discordant = 0;
  std::int64_t n_pairs = 0;  // C(n, 2), ties included
};

// Kendall tau-a of `estimated` against a ground-truth order listed from worst
// to best. Pairs with equal estimated scores count as neither concordant nor
// discordant but stay in the C(n, 2) denominator.
RankingComparison kendall_tau(const ScoreVector& estimated,
                              std::span<const ItemIndex> ground_truth_order);

// method_tau / baseline_tau; throws BaselineNonPositive if baseline_tau <= 0.
double accuracy_ratio(double method_tau, double baseline_tau);

}  // namespace crowdc::metrics
