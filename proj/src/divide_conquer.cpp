#include "crowdc/divide_conquer.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include <fmt/format.h>

#include "crowdc/rng.hpp"

namespace crowdc::dc {

Partition divide(std::span<const ItemIndex> items, int group_count, Seed partition_seed) {
  if (group_count < 1 || items.size() % static_cast<std::size_t>(group_count) != 0) {
    throw IndivisibleGroupSize(
        fmt::format("{} items cannot be split into {} equal groups", items.size(), group_count));
  }
  std::vector<ItemIndex> shuffled(items.begin(), items.end());
  SplitMix64 rng(partition_seed);
  for (std::size_t i = shuffled.size(); i > 1; --i) {
    std::swap(shuffled[i - 1], shuffled[rng.uniform_below(i)]);
  }

  const std::size_t size = items.size() / static_cast<std::size_t>(group_count);
  Partition partition;
  partition.groups.reserve(static_cast<std::size_t>(group_count));
  for (int k = 0; k < group_count; ++k) {
    auto first = shuffled.begin() + static_cast<std::ptrdiff_t>(k * size);
    std::vector<ItemIndex> group(first, first + static_cast<std::ptrdiff_t>(size));
    std::sort(group.begin(), group.end());
    partition.groups.push_back(std::move(group));
  }
  return partition;
}

PivotOrderSet pivot_orders(int group_size, int pivot_count) {
  if (pivot_count < 2 || pivot_count > group_size) {
    throw PivotCountOutOfRange(fmt::format("pivot count {} outside [2, {}]", pivot_count,
                                           group_size));
  }
  PivotOrderSet set;
  set.orders.reserve(static_cast<std::size_t>(pivot_count));
  const std::int64_t span = group_size - 1;
  for (std::int64_t i = 1; i <= pivot_count; ++i) {
    const std::int64_t k = span * (i - 1) / (pivot_count - 1) + 1;
    set.orders.push_back(static_cast<int>(std::min<std::int64_t>(k, group_size)));
  }
  return set;
}

namespace {

void require_coverage(const ScoreVector& scores, const std::vector<ItemIndex>& items,
                      std::string_view what) {
  std::vector<ItemIndex> sorted = items;
  std::sort(sorted.begin(), sorted.end());
  if (scores.items() != sorted) {
    throw ScoreCoverageMismatch(fmt::format("{} scores do not cover exactly their items", what));
  }
}

}  // namespace

PivotSelection select_pivots(const Partition& partition,
                             std::span<const ScoreVector> within_scores, int pivot_count) {
  if (within_scores.size() != partition.group_count()) {
    throw ScoreCoverageMismatch(fmt::format("{} score vectors for {} groups",
                                            within_scores.size(), partition.group_count()));
  }
  const auto orders = pivot_orders(static_cast<int>(partition.group_size()), pivot_count);

  PivotSelection selection{partition, {}};
  selection.partition.pivots.clear();
  for (std::size_t i = 0; i < partition.group_count(); ++i) {
    require_coverage(within_scores[i], partition.groups[i], "within-group");
    const auto ranked = within_scores[i].ascending_order();
    std::vector<ItemIndex> pivots;
    pivots.reserve(orders.orders.size());
    for (int rank : orders.orders) pivots.push_back(ranked[static_cast<std::size_t>(rank - 1)]);
    selection.all_pivots.insert(selection.all_pivots.end(), pivots.begin(), pivots.end());
    selection.partition.pivots.push_back(std::move(pivots));
  }
  return selection;
}

double interpolate(double in_left, double in, double in_right, double out_left,
                   double out_right) {
  if (in_right == in_left) return (out_left + out_right) / 2;
  return out_left + (in - in_left) / (in_right - in_left) * (out_right - out_left);
}

ScoreVector conquer(const Partition& partition, std::span<const ScoreVector> within_scores,
                    const ScoreVector& out_scores) {
  if (!partition.has_pivots() || partition.pivots.size() != partition.group_count()) {
    throw ScoreCoverageMismatch("partition has no pivots selected");
  }
  if (within_scores.size() != partition.group_count()) {
    throw ScoreCoverageMismatch("one within-group score vector per group required");
  }
  require_coverage(out_scores, partition.all_pivots(), "out-of-group");

  std::vector<ScoreVector::Entry> finals;
  for (std::size_t i = 0; i < partition.group_count(); ++i) {
    const auto& within = within_scores[i];
    const auto& pivots = partition.pivots[i];
    require_coverage(within, partition.groups[i], "within-group");
    const std::unordered_set<ItemIndex> pivot_set(pivots.begin(), pivots.end());

    for (ItemIndex item : partition.groups[i]) {
      if (pivot_set.contains(item)) {
        finals.emplace_back(item, out_scores.at(item));
        continue;
      }
      const double in = within.at(item);
      bool placed = false;
      for (std::size_t k = 0; k + 1 < pivots.size(); ++k) {
        const ItemIndex left = pivots[k];
        const ItemIndex right = pivots[k + 1];
        const double in_left = within.at(left);
        const double in_right = within.at(right);
        if (in_left <= in && in <= in_right) {
          finals.emplace_back(item, interpolate(in_left, in, in_right, out_scores.at(left),
                                                out_scores.at(right)));
          placed = true;
          break;
        }
      }
      if (!placed) {
        throw BracketNotFound(fmt::format("no pivot bracket holds item {} in group {}", item, i));
      }
    }
  }
  return ScoreVector(ScoreFlavor::kFinal, std::move(finals));
}

std::int64_t unique_pairs_closed_form(int n, int group_count, int pivot_count) {
  const std::int64_t g = group_count;
  const std::int64_t p = pivot_count;
  return g * choose2(n / g) + choose2(g * p) - g * choose2(p);
}

CrowdcResult run_crowdc(std::span<const ItemIndex> items, const ComparisonProvider& provider,
                        const CrowdcConfig& config) {
  const int n = static_cast<int>(items.size());
  // t and r do not constrain the structure; pass values that always pass.
  validate_parameters(Parameters{n, 1, 1.0, config.group_count, config.pivot_count});

  Partition partition = divide(items, config.group_count, config.partition_seed);

  std::int64_t issued = 0;
  std::vector<std::vector<Comparison>> group_comparisons;
  std::vector<ScoreVector> within;
  group_comparisons.reserve(partition.group_count());
  within.reserve(partition.group_count());
  for (const auto& group : partition.groups) {
    const auto pairs = all_pairs(group);
    issued += static_cast<std::int64_t>(pairs.size());
    group_comparisons.push_back(provider(pairs));
    within.push_back(
        btl::fit_normalized(group_comparisons.back(), group, config.fit, ScoreFlavor::kWithinGroup));
  }

  auto selection = select_pivots(partition, within, config.pivot_count);
  const auto& pivot_groups = selection.partition.pivots;

  // Pivot pairs from the same group were already compared in their group;
  // their verdicts are reused. Only cross-group pairs are requested.
  std::unordered_map<ItemIndex, std::size_t> group_of;
  for (std::size_t i = 0; i < pivot_groups.size(); ++i) {
    for (ItemIndex item : pivot_groups[i]) group_of.emplace(item, i);
  }
  std::vector<Comparison> pivot_comparisons;
  for (std::size_t i = 0; i < group_comparisons.size(); ++i) {
    for (const auto& c : group_comparisons[i]) {
      if (group_of.contains(c.a()) && group_of.contains(c.b())) pivot_comparisons.push_back(c);
    }
  }
  std::vector<ItemPair> cross_pairs;
  const auto& all_pivots = selection.all_pivots;
  for (std::size_t x = 0; x < all_pivots.size(); ++x) {
    for (std::size_t y = x + 1; y < all_pivots.size(); ++y) {
      if (group_of.at(all_pivots[x]) != group_of.at(all_pivots[y])) {
        cross_pairs.push_back(ItemPair::of(all_pivots[x], all_pivots[y]));
      }
    }
  }
  issued += static_cast<std::int64_t>(cross_pairs.size());
  auto fresh = provider(cross_pairs);
  pivot_comparisons.insert(pivot_comparisons.end(), std::make_move_iterator(fresh.begin()),
                           std::make_move_iterator(fresh.end()));

  ScoreVector out =
      btl::fit_normalized(pivot_comparisons, all_pivots, config.fit, ScoreFlavor::kOutOfGroup);
  ScoreVector final_scores = conquer(selection.partition, within, out);

  return CrowdcResult{std::move(selection.partition), std::move(within), std::move(out),
                      std::move(final_scores), issued};
}

}  // namespace crowdc::dc
