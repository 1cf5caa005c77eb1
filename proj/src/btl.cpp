#include "crowdc/btl.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

namespace crowdc::btl {

WinMatrix::WinMatrix(std::vector<ItemIndex> items)
    : items_(std::move(items)), wins_(items_.size() * items_.size(), 0) {
  std::vector<std::size_t> order(items_.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return items_[x] < items_[y]; });
  sorted_items_.reserve(order.size());
  for (std::size_t idx : order) sorted_items_.push_back(items_[idx]);
  if (std::adjacent_find(sorted_items_.begin(), sorted_items_.end()) != sorted_items_.end()) {
    throw Error("win matrix items must be distinct");
  }
  sorted_to_local_ = std::move(order);
}

std::optional<std::size_t> WinMatrix::local(ItemIndex global) const {
  auto it = std::lower_bound(sorted_items_.begin(), sorted_items_.end(), global);
  if (it == sorted_items_.end() || *it != global) return std::nullopt;
  return sorted_to_local_[static_cast<std::size_t>(it - sorted_items_.begin())];
}

void WinMatrix::add_win(std::size_t winner, std::size_t loser, std::int64_t count) {
  if (winner == loser) throw Error("win matrix diagonal must stay zero");
  if (winner >= size() || loser >= size()) throw std::out_of_range("win matrix index");
  wins_[winner * size() + loser] += count;
  total_ += count;
}

WinMatrix build_win_matrix(std::span<const Comparison> comparisons,
                           std::span<const ItemIndex> items) {
  WinMatrix matrix(std::vector<ItemIndex>(items.begin(), items.end()));
  for (const auto& c : comparisons) {
    auto winner = matrix.local(c.chosen());
    auto loser = matrix.local(c.loser());
    if (!winner || !loser) {
      throw UnknownItem(fmt::format("comparison {} vs {} references an item outside the set",
                                    c.a(), c.b()));
    }
    matrix.add_win(*winner, *loser);
  }
  return matrix;
}

void FitConfig::validate() const {
  if (max_iterations < 1) throw Error("max_iterations must be >= 1");
  if (!(convergence_tolerance > 0)) throw Error("convergence_tolerance must be > 0");
  if (!(regularization_epsilon >= 0)) throw Error("regularization_epsilon must be >= 0");
}

NotConverged::NotConverged(ScoreVector last_iterate, int iterations, double last_change)
    : Error(fmt::format("BT fit did not converge in {} iterations (last change {:g})",
                        iterations, last_change)),
      last_iterate_(std::move(last_iterate)),
      iterations_(iterations),
      last_change_(last_change) {}

namespace {

// Both forward and backward reachability from node 0 over edges i -> j with
// wins(i, j) > 0.
bool strongly_connected(const WinMatrix& m) {
  const std::size_t size = m.size();
  auto reach_all = [&](bool forward) {
    std::vector<char> seen(size, 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t v = 0; v < size; ++v) {
        if (seen[v]) continue;
        const std::int64_t w = forward ? m.wins(u, v) : m.wins(v, u);
        if (w > 0) {
          seen[v] = 1;
          ++count;
          stack.push_back(v);
        }
      }
    }
    return count == size;
  };
  return reach_all(true) && reach_all(false);
}

ScoreVector to_scores(const WinMatrix& m, const std::vector<double>& pi) {
  std::vector<ScoreVector::Entry> entries;
  entries.reserve(pi.size());
  for (std::size_t i = 0; i < pi.size(); ++i) entries.emplace_back(m.global(i), pi[i]);
  return ScoreVector(ScoreFlavor::kRawBT, std::move(entries));
}

}  // namespace

ScoreVector fit(const WinMatrix& win_matrix, const FitConfig& config) {
  config.validate();
  const std::size_t size = win_matrix.size();
  if (size == 0) throw Error("cannot fit an empty item set");
  if (size == 1) return to_scores(win_matrix, {1.0});

  const double eps = config.regularization_epsilon;
  if (eps == 0 && !strongly_connected(win_matrix)) {
    throw DisconnectedGraph("comparison graph is not strongly connected");
  }

  // Symmetric pair counts and per-item win totals, including pseudo-wins.
  std::vector<double> pair_counts(size * size, 0.0);
  std::vector<double> total_wins(size, 0.0);
  for (std::size_t i = 0; i < size; ++i) {
    for (std::size_t j = 0; j < size; ++j) {
      if (i == j) continue;
      const double w_ij = static_cast<double>(win_matrix.wins(i, j)) + eps;
      total_wins[i] += w_ij;
      pair_counts[i * size + j] =
          w_ij + static_cast<double>(win_matrix.wins(j, i)) + eps;
    }
  }

  std::vector<double> pi(size, 1.0 / static_cast<double>(size));
  std::vector<double> next(size);
  double change = 0;
  for (int iter = 1; iter <= config.max_iterations; ++iter) {
    double sum = 0;
    for (std::size_t i = 0; i < size; ++i) {
      double denom = 0;
      const double* row = &pair_counts[i * size];
      for (std::size_t j = 0; j < size; ++j) {
        if (row[j] > 0) denom += row[j] / (pi[i] + pi[j]);
      }
      next[i] = total_wins[i] / denom;
      sum += next[i];
    }
    change = 0;
    for (std::size_t i = 0; i < size; ++i) {
      next[i] /= sum;
      change = std::max(change, std::abs(next[i] - pi[i]));
    }
    pi.swap(next);
    if (change < config.convergence_tolerance) return to_scores(win_matrix, pi);
  }
  throw NotConverged(to_scores(win_matrix, pi), config.max_iterations, change);
}

double log_likelihood(const WinMatrix& win_matrix, std::span<const double> strengths,
                      double regularization_epsilon) {
  const std::size_t size = win_matrix.size();
  double ll = 0;
  for (std::size_t i = 0; i < size; ++i) {
    for (std::size_t j = 0; j < size; ++j) {
      if (i == j) continue;
      const double w = static_cast<double>(win_matrix.wins(i, j)) + regularization_epsilon;
      if (w > 0) ll += w * (std::log(strengths[i]) - std::log(strengths[i] + strengths[j]));
    }
  }
  return ll;
}

ScoreVector normalize(const ScoreVector& scores, ScoreFlavor flavor) {
  if (scores.size() < 2) throw DegenerateScores("need at least two scores to normalize");
  const auto values = scores.values();
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  const double scale = std::max(std::abs(lo), std::abs(hi));
  if (!(hi - lo > 1e-12 * scale)) throw DegenerateScores("all scores are equal");

  std::vector<ScoreVector::Entry> entries;
  entries.reserve(scores.size());
  for (const auto& [item, value] : scores.entries()) {
    double v = (value - lo) / (hi - lo);
    // Pin the endpoints exactly; rounding can leave the max at 1 - ulp.
    if (value == lo) v = 0.0;
    if (value == hi) v = 1.0;
    entries.emplace_back(item, v);
  }
  return ScoreVector(flavor, std::move(entries));
}

ScoreVector normalize_or_uniform(const ScoreVector& scores, ScoreFlavor flavor) {
  try {
    return normalize(scores, flavor);
  } catch (const DegenerateScores&) {
    std::vector<ScoreVector::Entry> entries;
    for (const auto& [item, value] : scores.entries()) entries.emplace_back(item, 0.5);
    return ScoreVector(flavor, std::move(entries));
  }
}

ScoreVector fit_normalized(std::span<const Comparison> comparisons,
                           std::span<const ItemIndex> items, const FitConfig& config,
                           ScoreFlavor flavor) {
  const auto matrix = build_win_matrix(comparisons, items);
  try {
    return normalize_or_uniform(fit(matrix, config), flavor);
  } catch (const NotConverged& e) {
    // Near-separable data (noiseless workers) creeps toward the boundary for
    // many iterations; the ordering has long settled by the budget's end.
    return normalize_or_uniform(e.last_iterate(), flavor);
  }
}

}  // namespace crowdc::btl
