#include "crowdc/metrics.hpp"

#include <cmath>
#include <random>

#include "crowdc/simulate.hpp"
#include "gtest/gtest.h"

namespace crowdc::metrics {
namespace {

ScoreVector final_scores(std::vector<ScoreVector::Entry> entries) {
  return ScoreVector(ScoreFlavor::kFinal, std::move(entries));
}

const std::vector<ItemIndex> kTruth{1, 2, 3};

TEST(KendallTau, PerfectAgreement) {
  const auto r = kendall_tau(final_scores({{1, 0.0}, {2, 0.5}, {3, 1.0}}), kTruth);
  EXPECT_DOUBLE_EQ(r.tau, 1.0);
  EXPECT_EQ(r.concordant, 3);
  EXPECT_EQ(r.n_pairs, 3);
}

TEST(KendallTau, Reversed) {
  EXPECT_DOUBLE_EQ(kendall_tau(final_scores({{1, 1.0}, {2, 0.5}, {3, 0.0}}), kTruth).tau, -1.0);
}

TEST(KendallTau, OneSwap) {
  const auto r = kendall_tau(final_scores({{1, 0.0}, {2, 1.0}, {3, 0.5}}), kTruth);
  EXPECT_NEAR(r.tau, 1.0 / 3.0, 1e-15);
  EXPECT_EQ(r.discordant, 1);
}

TEST(KendallTau, FourItemsOneSwap) {
  const std::vector<ItemIndex> truth{1, 2, 3, 4};
  EXPECT_NEAR(
      kendall_tau(final_scores({{1, 0.0}, {2, 0.3}, {3, 0.2}, {4, 1.0}}), truth).tau,
      2.0 / 3.0, 1e-15);
}

TEST(KendallTau, TiesStayInDenominator) {
  const auto r = kendall_tau(final_scores({{1, 0.5}, {2, 0.5}, {3, 0.5}}), kTruth);
  EXPECT_EQ(r.tau, 0.0);
  EXPECT_EQ(r.n_pairs, 3);
  EXPECT_NEAR(kendall_tau(final_scores({{1, 0.0}, {2, 0.0}, {3, 1.0}}), kTruth).tau, 2.0 / 3.0,
              1e-15);
}

TEST(KendallTau, CoverageMustMatch) {
  EXPECT_THROW(kendall_tau(final_scores({{1, 0.0}, {2, 1.0}}), kTruth), CoverageMismatch);
  EXPECT_THROW(kendall_tau(final_scores({{1, 0.0}, {2, 0.5}, {4, 1.0}}), kTruth),
               CoverageMismatch);
}

std::vector<ScoreVector::Entry> random_entries(std::mt19937& rng, int n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<ScoreVector::Entry> e;
  for (int i = 1; i <= n; ++i) e.emplace_back(i, std::round(u(rng) * 20) / 20);
  e[0].second = 0.0;
  e[1].second = 1.0;
  return e;
}

TEST(KendallTauProperty, BoundedAndInvariantUnderMonotoneMaps) {
  std::mt19937 rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 40);
    const auto entries = random_entries(rng, n);
    const auto truth = sim::make_dataset(n);
    const double tau = kendall_tau(final_scores(entries), truth).tau;
    EXPECT_GE(tau, -1.0);
    EXPECT_LE(tau, 1.0);

    auto squared = entries;
    for (auto& [item, v] : squared) v = v * v;
    EXPECT_DOUBLE_EQ(kendall_tau(final_scores(squared), truth).tau, tau);

    auto flipped = entries;
    for (auto& [item, v] : flipped) v = 1.0 - v;
    EXPECT_DOUBLE_EQ(kendall_tau(final_scores(flipped), truth).tau, -tau);
  }
}

TEST(AccuracyRatio, Examples) {
  EXPECT_DOUBLE_EQ(accuracy_ratio(0.9, 0.95), 0.9 / 0.95);
  EXPECT_DOUBLE_EQ(accuracy_ratio(0.5, 1.0), 0.5);
  EXPECT_THROW(accuracy_ratio(0.5, 0.0), BaselineNonPositive);
  EXPECT_THROW(accuracy_ratio(0.5, -0.2), BaselineNonPositive);
}

TEST(AccuracyRatio, NoiselessAllPivotsMatchesBaseline) {
  // With p = n/g every item is a pivot, so the pivot fit sees every pair.
  const int n = 30;
  const auto truth = sim::make_dataset(n);
  const sim::WorkerModel model{1.0, 1, 6};
  const double base = kendall_tau(sim::run_btl_baseline(n, model).final_scores, truth).tau;
  const auto crowdc = sim::run_crowdc_simulated(n, model, {3, n / 3, 2, {}});
  const double tau = kendall_tau(crowdc.final_scores, truth).tau;
  EXPECT_DOUBLE_EQ(accuracy_ratio(tau, base), 1.0);
}

}  // namespace
}  // namespace crowdc::metrics
