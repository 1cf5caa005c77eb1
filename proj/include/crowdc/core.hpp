#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace crowdc {

// 1-based item index. Doubles as the ground-truth rank: a higher index is
// truly better.
using ItemIndex = std::int32_t;

using Seed = std::uint64_t;

// Base of every error thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One subject's verdict on an unordered pair.
class Comparison {
 public:
  // Throws InvalidComparison unless a != b and chosen is one of a, b.
  Comparison(std::string subject_id, ItemIndex a, ItemIndex b, ItemIndex chosen);

  const std::string& subject_id() const { return subject_id_; }
  ItemIndex a() const { return a_; }
  ItemIndex b() const { return b_; }
  ItemIndex chosen() const { return chosen_; }
  ItemIndex loser() const { return chosen_ == a_ ? b_ : a_; }

  friend bool operator==(const Comparison&, const Comparison&) = default;

 private:
  std::string subject_id_;
  ItemIndex a_;
  ItemIndex b_;
  ItemIndex chosen_;
};

class InvalidComparison : public Error {
 public:
  using Error::Error;
};

// Unordered pair stored with lo < hi.
struct ItemPair {
  ItemIndex lo;
  ItemIndex hi;

  static ItemPair of(ItemIndex x, ItemIndex y) {
    return x < y ? ItemPair{x, y} : ItemPair{y, x};
  }
  friend auto operator<=>(const ItemPair&, const ItemPair&) = default;
};

// All C(k, 2) pairs over `items`.
std::vector<ItemPair> all_pairs(std::span<const ItemIndex> items);

enum class ScoreFlavor { kRawBT, kNormalized, kWithinGroup, kOutOfGroup, kFinal };

std::string_view to_string(ScoreFlavor flavor);

class InvalidScores : public Error {
 public:
  using Error::Error;
};

// Immutable item -> score mapping. Entries are kept sorted by item index.
//
// RawBT vectors are strictly positive and sum to 1 (within 1e-9); every other
// flavor lies in [0, 1] with min 0 and max 1. A single-item vector of any
// normalized flavor is exempt from the min/max rule.
class ScoreVector {
 public:
  using Entry = std::pair<ItemIndex, double>;

  ScoreVector(ScoreFlavor flavor, std::vector<Entry> entries);

  ScoreFlavor flavor() const { return flavor_; }
  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  bool contains(ItemIndex item) const;
  // Throws std::out_of_range for unknown items.
  double at(ItemIndex item) const;

  std::vector<ItemIndex> items() const;
  std::vector<double> values() const;

  // Same entries under another flavor (re-validated).
  ScoreVector with_flavor(ScoreFlavor flavor) const;

  // Items ordered by ascending score, ties by ascending index.
  std::vector<ItemIndex> ascending_order() const;

 private:
  ScoreFlavor flavor_;
  std::vector<Entry> entries_;
};

// Equal-size groups of items plus, once selected, each group's pivots in
// ascending within-group score order.
struct Partition {
  std::vector<std::vector<ItemIndex>> groups;
  std::vector<std::vector<ItemIndex>> pivots;

  std::size_t group_count() const { return groups.size(); }
  std::size_t group_size() const { return groups.empty() ? 0 : groups.front().size(); }
  bool has_pivots() const { return !pivots.empty(); }

  // Concatenation of every group's pivots (D.piv_all).
  std::vector<ItemIndex> all_pivots() const;
};

// Empty optional when the partition satisfies its invariants over `items`,
// otherwise a description of the first violated one.
std::optional<std::string> check_partition(const Partition& partition,
                                           std::span<const ItemIndex> items);

// ---------------------------------------------------------------------------
// Simulation parameters.

enum class ParameterViolation {
  kTooFewItems,            // n < 3
  kPivotCountTooSmall,     // p < 2
  kGroupCountTooSmall,     // g <= 1
  kGroupCountTooLarge,     // g > n / 3 (groups smaller than three items)
  kIndivisibleGroupSize,   // n % g != 0
  kPivotCountTooLarge,     // p > n / g
  kComparisonsPerPairTooSmall,  // t < 1
  kCorrectRateOutOfRange,  // r outside (0.5, 1]
};

std::string_view to_string(ParameterViolation violation);

class ParameterError : public Error {
 public:
  explicit ParameterError(ParameterViolation violation);
  ParameterViolation violation() const { return violation_; }

 private:
  ParameterViolation violation_;
};

struct Parameters {
  int n = 0;      // item count
  int t = 0;      // comparisons per pair
  double r = 0;   // correct rate
  int g = 0;      // group count
  int p = 0;      // pivot count

  int group_size() const { return n / g; }
};

// First violated constraint, if any. Group-count constraints are checked
// before divisibility and pivot constraints.
std::optional<ParameterViolation> find_violation(const Parameters& params);

// Only the constraints on (n, t, r); used for BTL-only runs.
std::optional<ParameterViolation> find_baseline_violation(int n, int t, double r);

// Returns `params` unchanged or throws ParameterError.
Parameters validate_parameters(const Parameters& params);

// ---------------------------------------------------------------------------
// Experiment records.

enum class Method { kBTL, kCrowDC };

std::string_view to_string(Method method);
Method method_from_string(std::string_view text);

struct ExperimentRecord {
  Method method = Method::kBTL;
  int n = 0;
  int t = 0;
  double r = 0;
  int g = 0;  // 0 for BTL rows
  int p = 0;  // 0 for BTL rows
  Seed dataset_seed = 0;
  Seed partition_seed = 0;  // 0 for BTL rows
  std::int64_t unique_pairs = 0;
  std::int64_t total_comparisons = 0;
  double kendall_tau = 0;
  std::optional<double> accuracy_ratio;  // missing when the baseline tau <= 0
  double reduction_ratio = 0;
};

// Builds a record enforcing total = unique_pairs * t and
// reduction = 1 - total / baseline_total.
ExperimentRecord make_record(Method method, const Parameters& params, Seed dataset_seed,
                             Seed partition_seed, std::int64_t unique_pairs, double tau,
                             std::optional<double> accuracy_ratio,
                             std::int64_t baseline_total);

inline std::int64_t choose2(std::int64_t k) { return k < 2 ? 0 : k * (k - 1) / 2; }

// ---------------------------------------------------------------------------
// Comparison CSV: header `subject_id,a,b,chosen`, 1-based indices.

class CsvError : public Error {
 public:
  using Error::Error;
};

void write_comparisons_csv(std::ostream& out, std::span<const Comparison> comparisons);
std::vector<Comparison> read_comparisons_csv(std::istream& in);

}  // namespace crowdc
