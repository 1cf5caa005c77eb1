#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "crowdc/btl.hpp"
#include "crowdc/core.hpp"

// Divide-and-conquer ranking: split the items into groups, rank each group,
// rank a handful of pivots from every group together, and map each group's
// within-group scores onto the shared pivot scale by linear interpolation.
namespace crowdc::dc {

class IndivisibleGroupSize : public Error {
 public:
  using Error::Error;
};

class PivotCountOutOfRange : public Error {
 public:
  using Error::Error;
};

class ScoreCoverageMismatch : public Error {
 public:
  using Error::Error;
};

class BracketNotFound : public Error {
 public:
  using Error::Error;
};

// Uniformly random split of `items` into `group_count` equal groups,
// determined entirely by `partition_seed`. Each group is listed in ascending
// item order; pivots are left empty.
Partition divide(std::span<const ItemIndex> items, int group_count, Seed partition_seed);

// 1-based ranks within a sorted group at which pivots are taken:
//   ord_i = min(floor((group_size - 1)(i - 1) / (p - 1)) + 1, group_size)
// Strictly increasing, starts at 1 and ends at group_size.
struct PivotOrderSet {
  std::vector<int> orders;
};

PivotOrderSet pivot_orders(int group_size, int pivot_count);

struct PivotSelection {
  Partition partition;              // pivots populated
  std::vector<ItemIndex> all_pivots;  // groups' pivots concatenated
};

// Sorts every group by ascending within-group score (ties by item index) and
// takes the items at pivot_orders(group_size, p).
PivotSelection select_pivots(const Partition& partition,
                             std::span<const ScoreVector> within_scores, int pivot_count);

// Linear map of `in` from the bracket [in_left, in_right] onto
// [out_left, out_right]. A zero-width bracket maps to the midpoint of the
// out-range.
double interpolate(double in_left, double in, double in_right, double out_left,
                   double out_right);

// Pivots keep their out-of-group score; every other item is interpolated
// between the first consecutive pivot pair of its group whose within-group
// scores bracket its own.
ScoreVector conquer(const Partition& partition, std::span<const ScoreVector> within_scores,
                    const ScoreVector& out_scores);

// Supplies verdicts for the requested pairs. Each call covers pairs not
// requested before in the same run.
using ComparisonProvider =
    std::function<std::vector<Comparison>(std::span<const ItemPair> pairs)>;

struct CrowdcConfig {
  int group_count = 2;
  int pivot_count = 2;
  Seed partition_seed = 0;
  btl::FitConfig fit{};
};

struct CrowdcResult {
  Partition partition;
  std::vector<ScoreVector> within_scores;
  ScoreVector out_scores;
  ScoreVector final_scores;
  std::int64_t unique_pairs_compared = 0;
};

// g * C(n/g, 2) + C(g p, 2) - g * C(p, 2): the distinct pairs one run issues
// when pivot pairs already compared inside their group are reused.
std::int64_t unique_pairs_closed_form(int n, int group_count, int pivot_count);

// divide -> group comparisons -> within-group fits -> pivot selection ->
// pivot comparisons (only pairs not already issued) -> out-of-group fit ->
// conquer.
CrowdcResult run_crowdc(std::span<const ItemIndex> items, const ComparisonProvider& provider,
                        const CrowdcConfig& config);

}  // namespace crowdc::dc
