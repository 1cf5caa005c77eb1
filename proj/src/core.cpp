#include "crowdc/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>

#include <fmt/format.h>

namespace crowdc {

Comparison::Comparison(std::string subject_id, ItemIndex a, ItemIndex b, ItemIndex chosen)
    : subject_id_(std::move(subject_id)), a_(a), b_(b), chosen_(chosen) {
  if (a_ == b_) {
    throw InvalidComparison(fmt::format("comparison of item {} with itself", a_));
  }
  if (chosen_ != a_ && chosen_ != b_) {
    throw InvalidComparison(
        fmt::format("chosen item {} is neither {} nor {}", chosen_, a_, b_));
  }
}

std::vector<ItemPair> all_pairs(std::span<const ItemIndex> items) {
  std::vector<ItemPair> pairs;
  pairs.reserve(static_cast<std::size_t>(choose2(static_cast<std::int64_t>(items.size()))));
  for (std::size_t i = 0; i < items.size(); ++i) {
    for (std::size_t j = i + 1; j < items.size(); ++j) {
      pairs.push_back(ItemPair::of(items[i], items[j]));
    }
  }
  return pairs;
}

std::string_view to_string(ScoreFlavor flavor) {
  switch (flavor) {
    case ScoreFlavor::kRawBT: return "RawBT";
    case ScoreFlavor::kNormalized: return "Normalized";
    case ScoreFlavor::kWithinGroup: return "WithinGroup";
    case ScoreFlavor::kOutOfGroup: return "OutOfGroup";
    case ScoreFlavor::kFinal: return "Final";
  }
  return "?";
}

namespace {

void validate_scores(ScoreFlavor flavor, const std::vector<ScoreVector::Entry>& entries) {
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (entries[i - 1].first == entries[i].first) {
      throw InvalidScores(fmt::format("duplicate item {}", entries[i].first));
    }
  }
  for (const auto& [item, value] : entries) {
    if (!std::isfinite(value)) {
      throw InvalidScores(fmt::format("non-finite score for item {}", item));
    }
  }
  if (entries.empty()) return;

  if (flavor == ScoreFlavor::kRawBT) {
    double sum = 0;
    for (const auto& [item, value] : entries) {
      if (!(value > 0)) {
        throw InvalidScores(fmt::format("raw score of item {} is not positive", item));
      }
      sum += value;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw InvalidScores(fmt::format("raw scores sum to {} instead of 1", sum));
    }
    return;
  }

  double lo = entries.front().second;
  double hi = lo;
  for (const auto& [item, value] : entries) {
    if (value < 0.0 || value > 1.0) {
      throw InvalidScores(fmt::format("score {} of item {} outside [0, 1]", value, item));
    }
    lo = std::min(lo, value);
    hi = std::max(hi, value);
  }
  // The uniform 0.5 fallback for degenerate fits is the one sanctioned
  // exception to the min/max rule.
  const bool uniform_half = lo == 0.5 && hi == 0.5;
  if (entries.size() > 1 && !uniform_half && (lo != 0.0 || hi != 1.0)) {
    throw InvalidScores(
        fmt::format("{} scores span [{}, {}] rather than [0, 1]", to_string(flavor), lo, hi));
  }
}

}  // namespace

ScoreVector::ScoreVector(ScoreFlavor flavor, std::vector<Entry> entries)
    : flavor_(flavor), entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end(),
            [](const Entry& x, const Entry& y) { return x.first < y.first; });
  validate_scores(flavor_, entries_);
}

bool ScoreVector::contains(ItemIndex item) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), item,
                             [](const Entry& e, ItemIndex i) { return e.first < i; });
  return it != entries_.end() && it->first == item;
}

double ScoreVector::at(ItemIndex item) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), item,
                             [](const Entry& e, ItemIndex i) { return e.first < i; });
  if (it == entries_.end() || it->first != item) {
    throw std::out_of_range(fmt::format("no score for item {}", item));
  }
  return it->second;
}

std::vector<ItemIndex> ScoreVector::items() const {
  std::vector<ItemIndex> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.first);
  return out;
}

std::vector<double> ScoreVector::values() const {
  std::vector<double> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.second);
  return out;
}

ScoreVector ScoreVector::with_flavor(ScoreFlavor flavor) const {
  return ScoreVector(flavor, entries_);
}

std::vector<ItemIndex> ScoreVector::ascending_order() const {
  std::vector<Entry> sorted = entries_;
  // entries_ is already sorted by index, so a stable sort on score gives the
  // ascending-index tie-break.
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const Entry& x, const Entry& y) { return x.second < y.second; });
  std::vector<ItemIndex> out;
  out.reserve(sorted.size());
  for (const auto& e : sorted) out.push_back(e.first);
  return out;
}

std::vector<ItemIndex> Partition::all_pivots() const {
  std::vector<ItemIndex> out;
  for (const auto& group : pivots) out.insert(out.end(), group.begin(), group.end());
  return out;
}

std::optional<std::string> check_partition(const Partition& partition,
                                           std::span<const ItemIndex> items) {
  if (partition.groups.empty()) return "no groups";
  const std::size_t size = partition.group_size();
  std::multiset<ItemIndex> seen;
  for (const auto& group : partition.groups) {
    if (group.size() != size) return "groups differ in size";
    seen.insert(group.begin(), group.end());
  }
  std::multiset<ItemIndex> expected(items.begin(), items.end());
  if (seen != expected) return "groups do not partition the item set";

  if (!partition.has_pivots()) return std::nullopt;
  if (partition.pivots.size() != partition.groups.size()) return "pivot list count != group count";
  for (std::size_t i = 0; i < partition.groups.size(); ++i) {
    const auto& group = partition.groups[i];
    for (ItemIndex pivot : partition.pivots[i]) {
      if (std::find(group.begin(), group.end(), pivot) == group.end()) {
        return fmt::format("pivot {} not in group {}", pivot, i);
      }
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

std::string_view to_string(ParameterViolation violation) {
  switch (violation) {
    case ParameterViolation::kTooFewItems: return "TooFewItems";
    case ParameterViolation::kPivotCountTooSmall: return "PivotCountTooSmall";
    case ParameterViolation::kGroupCountTooSmall: return "GroupCountTooSmall";
    case ParameterViolation::kGroupCountTooLarge: return "GroupCountTooLarge";
    case ParameterViolation::kIndivisibleGroupSize: return "IndivisibleGroupSize";
    case ParameterViolation::kPivotCountTooLarge: return "PivotCountTooLarge";
    case ParameterViolation::kComparisonsPerPairTooSmall: return "ComparisonsPerPairTooSmall";
    case ParameterViolation::kCorrectRateOutOfRange: return "CorrectRateOutOfRange";
  }
  return "?";
}

ParameterError::ParameterError(ParameterViolation violation)
    : Error(std::string(to_string(violation))), violation_(violation) {}

std::optional<ParameterViolation> find_baseline_violation(int n, int t, double r) {
  if (n < 3) return ParameterViolation::kTooFewItems;
  if (t < 1) return ParameterViolation::kComparisonsPerPairTooSmall;
  if (!(r > 0.5 && r <= 1.0)) return ParameterViolation::kCorrectRateOutOfRange;
  return std::nullopt;
}

std::optional<ParameterViolation> find_violation(const Parameters& params) {
  if (params.n < 3) return ParameterViolation::kTooFewItems;
  if (params.g <= 1) return ParameterViolation::kGroupCountTooSmall;
  // Every group needs at least three items: two pivots and one to place.
  if (3 * static_cast<std::int64_t>(params.g) > params.n) {
    return ParameterViolation::kGroupCountTooLarge;
  }
  if (params.n % params.g != 0) return ParameterViolation::kIndivisibleGroupSize;
  if (params.p < 2) return ParameterViolation::kPivotCountTooSmall;
  if (params.p > params.n / params.g) return ParameterViolation::kPivotCountTooLarge;
  if (auto v = find_baseline_violation(params.n, params.t, params.r)) return v;
  return std::nullopt;
}

Parameters validate_parameters(const Parameters& params) {
  if (auto violation = find_violation(params)) throw ParameterError(*violation);
  return params;
}

// ---------------------------------------------------------------------------

std::string_view to_string(Method method) {
  return method == Method::kBTL ? "btl" : "crowdc";
}

Method method_from_string(std::string_view text) {
  if (text == "btl") return Method::kBTL;
  if (text == "crowdc") return Method::kCrowDC;
  throw Error(fmt::format("unknown method '{}'", text));
}

ExperimentRecord make_record(Method method, const Parameters& params, Seed dataset_seed,
                             Seed partition_seed, std::int64_t unique_pairs, double tau,
                             std::optional<double> accuracy_ratio,
                             std::int64_t baseline_total) {
  ExperimentRecord rec;
  rec.method = method;
  rec.n = params.n;
  rec.t = params.t;
  rec.r = params.r;
  rec.g = method == Method::kBTL ? 0 : params.g;
  rec.p = method == Method::kBTL ? 0 : params.p;
  rec.dataset_seed = dataset_seed;
  rec.partition_seed = method == Method::kBTL ? 0 : partition_seed;
  rec.unique_pairs = unique_pairs;
  rec.total_comparisons = unique_pairs * params.t;
  rec.kendall_tau = tau;
  rec.accuracy_ratio = accuracy_ratio;
  rec.reduction_ratio = 1.0 - static_cast<double>(rec.total_comparisons) /
                                  static_cast<double>(baseline_total);
  return rec;
}

// ---------------------------------------------------------------------------

void write_comparisons_csv(std::ostream& out, std::span<const Comparison> comparisons) {
  out << "subject_id,a,b,chosen\n";
  for (const auto& c : comparisons) {
    out << c.subject_id() << ',' << c.a() << ',' << c.b() << ',' << c.chosen() << '\n';
  }
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

ItemIndex parse_item(std::string_view field, std::size_t line_no) {
  field = trim(field);
  ItemIndex value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || value < 1) {
    throw CsvError(fmt::format("line {}: '{}' is not a positive item index", line_no, field));
  }
  return value;
}

}  // namespace

std::vector<Comparison> read_comparisons_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw CsvError("missing header row");
  auto header = split_fields(trim(line));
  for (auto& h : header) h = trim(h);
  const std::vector<std::string_view> expected{"subject_id", "a", "b", "chosen"};
  if (header != expected) {
    throw CsvError("header must be 'subject_id,a,b,chosen'");
  }

  std::vector<Comparison> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_fields(line);
    if (fields.size() != 4) {
      throw CsvError(fmt::format("line {}: expected 4 fields, got {}", line_no, fields.size()));
    }
    try {
      out.emplace_back(std::string(trim(fields[0])), parse_item(fields[1], line_no),
                       parse_item(fields[2], line_no), parse_item(fields[3], line_no));
    } catch (const InvalidComparison& e) {
      throw CsvError(fmt::format("line {}: {}", line_no, e.what()));
    }
  }
  return out;
}

}  // namespace crowdc
