#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "crowdc/core.hpp"

namespace crowdc::btl {

class UnknownItem : public Error {
 public:
  using Error::Error;
};

// Pairwise win counts over a local, contiguous index space [0, size).
// wins(i, j) is the number of comparisons in which local item i beat j.
class WinMatrix {
 public:
  explicit WinMatrix(std::vector<ItemIndex> items);

  std::size_t size() const { return items_.size(); }
  const std::vector<ItemIndex>& items() const { return items_; }
  ItemIndex global(std::size_t local) const { return items_[local]; }
  std::optional<std::size_t> local(ItemIndex global) const;

  std::int64_t wins(std::size_t winner, std::size_t loser) const {
    return wins_[winner * size() + loser];
  }
  void add_win(std::size_t winner, std::size_t loser, std::int64_t count = 1);

  std::int64_t total() const { return total_; }

 private:
  std::vector<ItemIndex> items_;
  std::vector<ItemIndex> sorted_items_;
  std::vector<std::size_t> sorted_to_local_;
  std::vector<std::int64_t> wins_;
  std::int64_t total_ = 0;
};

// Throws UnknownItem if a comparison names an item outside `items`.
WinMatrix build_win_matrix(std::span<const Comparison> comparisons,
                           std::span<const ItemIndex> items);

struct FitConfig {
  int max_iterations = 10'000;
  // Largest absolute change of any simplex-normalized score between sweeps.
  double convergence_tolerance = 1e-8;
  // Pseudo-wins added in both directions for every pair.
  double regularization_epsilon = 0.01;

  // Throws Error when a field is out of range.
  void validate() const;
};

class NotConverged : public Error {
 public:
  NotConverged(ScoreVector last_iterate, int iterations, double last_change);
  const ScoreVector& last_iterate() const { return last_iterate_; }
  int iterations() const { return iterations_; }
  double last_change() const { return last_change_; }

 private:
  ScoreVector last_iterate_;
  int iterations_;
  double last_change_;
};

class DisconnectedGraph : public Error {
 public:
  using Error::Error;
};

class DegenerateScores : public Error {
 public:
  using Error::Error;
};

// Maximum-likelihood Bradley-Terry strengths on the probability simplex,
// computed with the minorization-maximization fixed point
//
//   pi_i <- W_i / sum_{j != i} n_ij / (pi_i + pi_j)
//
// where W_i counts i's (pseudo-)wins and n_ij the (pseudo-)comparisons of
// i against j. Returns a RawBT vector keyed by global item index.
ScoreVector fit(const WinMatrix& win_matrix, const FitConfig& config = {});

// Regularized BT log-likelihood at `strengths` (local order).
// Exposed for tests and diagnostics.
double log_likelihood(const WinMatrix& win_matrix, std::span<const double> strengths,
                      double regularization_epsilon);

// Min-max map to [0, 1]. Throws DegenerateScores when all scores coincide
// (relative spread below 1e-12) or fewer than two items are given.
ScoreVector normalize(const ScoreVector& scores, ScoreFlavor flavor = ScoreFlavor::kNormalized);

// normalize(), except degenerate input maps to 0.5 for every item.
ScoreVector normalize_or_uniform(const ScoreVector& scores,
                                 ScoreFlavor flavor = ScoreFlavor::kNormalized);

// build_win_matrix + fit + normalize_or_uniform. A fit that exhausts its
// iteration budget contributes its last iterate instead of failing.
ScoreVector fit_normalized(std::span<const Comparison> comparisons,
                           std::span<const ItemIndex> items, const FitConfig& config,
                           ScoreFlavor flavor);

}  // namespace crowdc::btl
