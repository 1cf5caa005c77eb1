#include "crowdc/simulate.hpp"

#include <numeric>

#include <fmt/format.h>

#include "crowdc/rng.hpp"

namespace crowdc::sim {

void WorkerModel::validate() const {
  if (!(correct_rate > 0.5 && correct_rate <= 1.0)) {
    throw ParameterError(ParameterViolation::kCorrectRateOutOfRange);
  }
  if (comparisons_per_pair < 1) {
    throw ParameterError(ParameterViolation::kComparisonsPerPairTooSmall);
  }
}

std::vector<Comparison> generate_comparisons(std::span<const ItemPair> pairs,
                                             const WorkerModel& model,
                                             std::uint64_t first_subject_id) {
  model.validate();
  std::vector<Comparison> out;
  out.reserve(pairs.size() * static_cast<std::size_t>(model.comparisons_per_pair));
  std::uint64_t subject = first_subject_id;
  for (const auto& pair : pairs) {
    if (pair.lo >= pair.hi) {
      throw Error(fmt::format("pair ({}, {}) is not ordered lo < hi", pair.lo, pair.hi));
    }
    SplitMix64 rng(derive_seed(model.rng_seed, {static_cast<std::uint64_t>(pair.lo),
                                                static_cast<std::uint64_t>(pair.hi)}));
    for (int rep = 0; rep < model.comparisons_per_pair; ++rep) {
      const bool correct = rng.uniform01() < model.correct_rate;
      out.emplace_back(std::to_string(subject++), pair.lo, pair.hi,
                       correct ? pair.hi : pair.lo);
    }
  }
  return out;
}

std::vector<Comparison> SimulatedProvider::operator()(std::span<const ItemPair> pairs) {
  auto out = generate_comparisons(pairs, model_, next_subject_);
  next_subject_ += out.size();
  pairs_issued_ += static_cast<std::int64_t>(pairs.size());
  return out;
}

std::vector<ItemIndex> make_dataset(int n) {
  std::vector<ItemIndex> items(static_cast<std::size_t>(n));
  std::iota(items.begin(), items.end(), 1);
  return items;
}

BaselineResult run_btl_baseline(int n, const WorkerModel& model,
                                const btl::FitConfig& fit_config) {
  if (n < 2) throw Error("baseline needs at least two items");
  const auto items = make_dataset(n);
  const auto pairs = all_pairs(items);
  const auto comparisons = generate_comparisons(pairs, model);
  auto scores = btl::fit_normalized(comparisons, items, fit_config, ScoreFlavor::kFinal);
  return BaselineResult{std::move(scores), static_cast<std::int64_t>(pairs.size())};
}

dc::CrowdcResult run_crowdc_simulated(int n, const WorkerModel& model,
                                      const dc::CrowdcConfig& config) {
  const auto items = make_dataset(n);
  SimulatedProvider provider(model);
  return dc::run_crowdc(items, std::ref(provider), config);
}

CostBreakdown cost_formulas(int n, int g, int p, int t) {
  const std::int64_t gg = g;
  const std::int64_t tt = t;
  CostBreakdown cost;
  cost.baseline_total = choose2(n) * tt;
  cost.crowdc_total_naive = (gg * choose2(n / g) + choose2(gg * p)) * tt;
  cost.crowdc_total_shared = cost.crowdc_total_naive - gg * choose2(p) * tt;
  return cost;
}

}  // namespace crowdc::sim
