#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "crowdc/btl.hpp"
#include "crowdc/core.hpp"
#include "crowdc/divide_conquer.hpp"

namespace crowdc::sim {

// Flat-noise worker: on a pair (a, b) with b > a the truly better item b is
// chosen with probability correct_rate, independently per repetition.
struct WorkerModel {
  double correct_rate = 0.8;
  int comparisons_per_pair = 1;
  Seed rng_seed = 0;

  void validate() const;
};

// Exactly pairs.size() * t comparisons, pair by pair in input order. The
// verdicts for a pair depend only on (rng_seed, pair, t, r), so the same pair
// receives the same verdicts whichever call requests it. Subject ids count
// up from first_subject_id.
std::vector<Comparison> generate_comparisons(std::span<const ItemPair> pairs,
                                             const WorkerModel& model,
                                             std::uint64_t first_subject_id = 0);

// Stateful provider for run_crowdc: keeps the subject counter running across
// calls and counts the distinct pairs it was asked for.
class SimulatedProvider {
 public:
  explicit SimulatedProvider(WorkerModel model) : model_(model) { model_.validate(); }

  std::vector<Comparison> operator()(std::span<const ItemPair> pairs);

  std::int64_t pairs_issued() const { return pairs_issued_; }

 private:
  WorkerModel model_;
  std::uint64_t next_subject_ = 0;
  std::int64_t pairs_issued_ = 0;
};

// Items 1..n; item index is the ground-truth rank.
std::vector<ItemIndex> make_dataset(int n);

struct BaselineResult {
  ScoreVector final_scores;
  std::int64_t unique_pairs_compared = 0;
};

// Compares every pair once per repetition and fits BT over everything.
BaselineResult run_btl_baseline(int n, const WorkerModel& model,
                                const btl::FitConfig& fit_config = {});

// run_crowdc on the simulated dataset 1..n.
dc::CrowdcResult run_crowdc_simulated(int n, const WorkerModel& model,
                                      const dc::CrowdcConfig& config);

struct CostBreakdown {
  std::int64_t baseline_total = 0;       // C(n,2) t
  std::int64_t crowdc_total_naive = 0;   // (g C(n/g,2) + C(gp,2)) t
  std::int64_t crowdc_total_shared = 0;  // naive - g C(p,2) t
};

CostBreakdown cost_formulas(int n, int g, int p, int t);

}  // namespace crowdc::sim
