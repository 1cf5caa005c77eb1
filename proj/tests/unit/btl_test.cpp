#include "crowdc/btl.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "crowdc/simulate.hpp"
#include "gtest/gtest.h"
#include "oracle/bt_grid_search.hpp"

namespace crowdc::btl {
namespace {

std::vector<Comparison> beats(ItemIndex winner, ItemIndex loser, int times) {
  std::vector<Comparison> out;
  for (int i = 0; i < times; ++i) out.emplace_back("s", winner, loser, winner);
  return out;
}

WinMatrix matrix_of(const std::vector<std::vector<int>>& wins) {
  std::vector<ItemIndex> items(wins.size());
  std::iota(items.begin(), items.end(), 1);
  WinMatrix m(items);
  for (std::size_t i = 0; i < wins.size(); ++i) {
    for (std::size_t j = 0; j < wins.size(); ++j) {
      if (i != j && wins[i][j] > 0) m.add_win(i, j, wins[i][j]);
    }
  }
  return m;
}

FitConfig unregularized() { return FitConfig{10'000, 1e-10, 0.0}; }

TEST(BuildWinMatrix, CountsVerdicts) {
  auto comparisons = beats(1, 2, 2);
  comparisons.emplace_back("s", 1, 2, 2);
  const std::vector<ItemIndex> items{1, 2};
  const auto m = build_win_matrix(comparisons, items);
  EXPECT_EQ(m.wins(0, 1), 2);
  EXPECT_EQ(m.wins(1, 0), 1);
  EXPECT_EQ(m.wins(0, 0), 0);
  EXPECT_EQ(m.total(), 3);
}

TEST(BuildWinMatrix, EmptyComparisonsGiveZeroMatrix) {
  const std::vector<ItemIndex> items{1, 2, 3};
  const auto m = build_win_matrix({}, items);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(m.wins(i, j), 0);
  }
  EXPECT_EQ(m.total(), 0);
}

TEST(BuildWinMatrix, NoiselessGeneratorFavoursHigherIndex) {
  const std::vector<ItemIndex> items{1, 2, 3};
  const auto pairs = all_pairs(items);
  const auto comparisons = sim::generate_comparisons(pairs, {1.0, 2, 99});
  const auto m = build_win_matrix(comparisons, items);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      EXPECT_EQ(m.wins(j, i), j > i ? 2 : 0) << j << " vs " << i;
    }
  }
}

TEST(BuildWinMatrix, LocalIndexSpaceMapsBackToGlobal) {
  const std::vector<ItemIndex> items{40, 7, 19};
  const auto m = build_win_matrix(beats(19, 40, 1), items);
  EXPECT_EQ(m.local(7), 1u);
  EXPECT_EQ(m.global(*m.local(19)), 19);
  EXPECT_EQ(m.local(8), std::nullopt);
  EXPECT_EQ(m.wins(2, 0), 1);
}

TEST(BuildWinMatrix, AddWinTakesLocalIndices) {
  WinMatrix m({10, 20});
  m.add_win(1, 0, 2);
  EXPECT_EQ(m.wins(1, 0), 2);
  EXPECT_THROW(m.add_win(10, 20, 1), std::out_of_range);
  EXPECT_THROW(m.add_win(0, 0, 1), Error);
}

TEST(BuildWinMatrix, UnknownItemIsRejected) {
  const std::vector<ItemIndex> items{1, 2};
  EXPECT_THROW(build_win_matrix(beats(1, 3, 1), items), UnknownItem);
}

TEST(Fit, SymmetricRecordSplitsEvenly) {
  const auto s = fit(matrix_of({{0, 1}, {1, 0}}), unregularized());
  EXPECT_NEAR(s.at(1), 0.5, 1e-12);
  EXPECT_NEAR(s.at(2), 0.5, 1e-12);
  EXPECT_EQ(s.flavor(), ScoreFlavor::kRawBT);
}

TEST(Fit, ThreeToOneRecord) {
  // Two-item MLE: pi_1 / (pi_1 + pi_2) = 3 / 4.
  const auto s = fit(matrix_of({{0, 3}, {1, 0}}), unregularized());
  EXPECT_NEAR(s.at(1), 0.75, 1e-8);
  EXPECT_NEAR(s.at(2), 0.25, 1e-8);
  const auto o = oracle::grid_search_mle({{0, 3}, {1, 0}});
  EXPECT_NEAR(o[0], 0.75, 1e-4);
}

TEST(Fit, NoiselessDataPreservesOrder) {
  const std::vector<ItemIndex> items{1, 2, 3};
  const auto comparisons = sim::generate_comparisons(all_pairs(items), {1.0, 10, 5});
  const auto s = fit(build_win_matrix(comparisons, items), {});
  EXPECT_GT(s.at(3), s.at(2));
  EXPECT_GT(s.at(2), s.at(1));
}

TEST(Fit, DisconnectedGraphNeedsRegularization) {
  // Item 1 never loses, so no finite MLE exists.
  const auto m = matrix_of({{0, 2, 1}, {0, 0, 1}, {0, 1, 0}});
  EXPECT_THROW(fit(m, unregularized()), DisconnectedGraph);
  EXPECT_NO_THROW(fit(m, {}));
}

TEST(Fit, IterationBudgetExhaustionCarriesLastIterate) {
  const auto m = matrix_of({{0, 5, 4}, {1, 0, 3}, {2, 1, 0}});
  try {
    fit(m, FitConfig{1, 1e-15, 0.0});
    FAIL() << "expected NotConverged";
  } catch (const NotConverged& e) {
    EXPECT_EQ(e.iterations(), 1);
    EXPECT_EQ(e.last_iterate().size(), 3u);
    EXPECT_GT(e.last_change(), 1e-15);
  }
}

TEST(Fit, RejectsInvalidConfig) {
  const auto m = matrix_of({{0, 1}, {1, 0}});
  EXPECT_THROW(fit(m, FitConfig{0, 1e-8, 0.01}), Error);
  EXPECT_THROW(fit(m, FitConfig{10, 0.0, 0.01}), Error);
  EXPECT_THROW(fit(m, FitConfig{10, 1e-8, -1.0}), Error);
}

TEST(Fit, AgreesWithGridSearchOnRandomSmallTables) {
  std::mt19937 rng(2024);
  int checked = 0;
  while (checked < 150) {
    const std::size_t size = 2 + rng() % 2;
    oracle::WinTable w(size, std::vector<int>(size, 0));
    for (std::size_t i = 0; i < size; ++i) {
      for (std::size_t j = 0; j < size; ++j) {
        if (i != j) w[i][j] = static_cast<int>(rng() % 6);
      }
    }
    ScoreVector s(ScoreFlavor::kRawBT, {{1, 1.0}});
    try {
      s = fit(matrix_of(w), FitConfig{10'000, 1e-8, 0.0});
    } catch (const DisconnectedGraph&) {
      continue;
    }
    const auto expected = oracle::grid_search_mle(w);
    for (std::size_t i = 0; i < size; ++i) {
      EXPECT_NEAR(s.at(static_cast<ItemIndex>(i + 1)), expected[i], 1e-3);
    }
    ++checked;
  }
}

TEST(Fit, MaximizesTheRegularizedLikelihood) {
  const auto m = matrix_of({{0, 3, 0, 2}, {1, 0, 4, 0}, {2, 1, 0, 5}, {0, 2, 1, 0}});
  const FitConfig config{};
  const auto s = fit(m, config).values();
  const double best = log_likelihood(m, s, config.regularization_epsilon);
  std::mt19937 rng(1);
  std::normal_distribution<double> jitter(0.0, 0.01);
  for (int trial = 0; trial < 200; ++trial) {
    auto perturbed = s;
    double total = 0;
    for (double& v : perturbed) total += v = std::max(1e-9, v * std::exp(jitter(rng)));
    for (double& v : perturbed) v /= total;
    EXPECT_LE(log_likelihood(m, perturbed, config.regularization_epsilon), best + 1e-12);
  }
}

TEST(FitProperty, PermutationEquivariant) {
  std::mt19937 rng(77);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t size = 3 + rng() % 6;
    std::vector<std::vector<int>> w(size, std::vector<int>(size, 0));
    for (std::size_t i = 0; i < size; ++i) {
      for (std::size_t j = 0; j < size; ++j) {
        if (i != j) w[i][j] = static_cast<int>(rng() % 5);
      }
    }
    std::vector<std::size_t> perm(size);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<std::vector<int>> permuted(size, std::vector<int>(size, 0));
    for (std::size_t i = 0; i < size; ++i) {
      for (std::size_t j = 0; j < size; ++j) permuted[perm[i]][perm[j]] = w[i][j];
    }
    const auto a = fit(matrix_of(w), {});
    const auto b = fit(matrix_of(permuted), {});
    for (std::size_t i = 0; i < size; ++i) {
      EXPECT_NEAR(a.at(static_cast<ItemIndex>(i + 1)),
                  b.at(static_cast<ItemIndex>(perm[i] + 1)), 1e-7);
    }
  }
}

TEST(FitProperty, RegularizedFitsAreFinitePositive) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t size = 2 + rng() % 10;
    std::vector<std::vector<int>> w(size, std::vector<int>(size, 0));
    // Sparse, often disconnected tables.
    for (std::size_t i = 0; i < size; ++i) {
      for (std::size_t j = 0; j < size; ++j) {
        if (i != j && rng() % 3 == 0) w[i][j] = static_cast<int>(rng() % 4);
      }
    }
    ScoreVector s(ScoreFlavor::kRawBT, {{1, 1.0}});
    try {
      s = fit(matrix_of(w), {});
    } catch (const NotConverged& e) {
      s = e.last_iterate();
    }
    for (double v : s.values()) {
      EXPECT_TRUE(std::isfinite(v));
      EXPECT_GT(v, 0.0);
    }
  }
}

TEST(FitProperty, DoublingCountsLeavesUnregularizedFitUnchanged) {
  std::mt19937 rng(9);
  int checked = 0;
  while (checked < 20) {
    const std::size_t size = 3 + rng() % 4;
    std::vector<std::vector<int>> w(size, std::vector<int>(size, 0));
    std::vector<std::vector<int>> doubled = w;
    for (std::size_t i = 0; i < size; ++i) {
      for (std::size_t j = 0; j < size; ++j) {
        if (i != j) {
          w[i][j] = 1 + static_cast<int>(rng() % 4);
          doubled[i][j] = 2 * w[i][j];
        }
      }
    }
    const auto a = fit(matrix_of(w), unregularized());
    const auto b = fit(matrix_of(doubled), unregularized());
    for (std::size_t i = 0; i < size; ++i) {
      EXPECT_NEAR(a.at(static_cast<ItemIndex>(i + 1)), b.at(static_cast<ItemIndex>(i + 1)), 1e-7);
    }
    ++checked;
  }
}

TEST(Normalize, TwoPoint) {
  const auto n = normalize(ScoreVector(ScoreFlavor::kRawBT, {{1, 0.25}, {2, 0.75}}));
  EXPECT_EQ(n.at(1), 0.0);
  EXPECT_EQ(n.at(2), 1.0);
  EXPECT_EQ(n.flavor(), ScoreFlavor::kNormalized);
}

TEST(Normalize, AffineMap) {
  const auto n = normalize(ScoreVector(ScoreFlavor::kRawBT, {{1, 0.2}, {2, 0.3}, {3, 0.5}}));
  EXPECT_EQ(n.at(1), 0.0);
  EXPECT_NEAR(n.at(2), 1.0 / 3.0, 1e-12);
  EXPECT_EQ(n.at(3), 1.0);
}

TEST(Normalize, DegenerateInput) {
  const ScoreVector flat(ScoreFlavor::kRawBT, {{1, 0.5}, {2, 0.5}});
  EXPECT_THROW(normalize(flat), DegenerateScores);
  EXPECT_THROW(normalize(ScoreVector(ScoreFlavor::kRawBT, {{1, 1.0}})), DegenerateScores);
  const auto fallback = normalize_or_uniform(flat, ScoreFlavor::kWithinGroup);
  EXPECT_EQ(fallback.values(), (std::vector<double>{0.5, 0.5}));
}

TEST(NormalizeProperty, PreservesOrderAndIsIdempotent) {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t size = 2 + rng() % 20;
    std::vector<ScoreVector::Entry> entries;
    double total = 0;
    for (std::size_t i = 0; i < size; ++i) {
      entries.emplace_back(static_cast<ItemIndex>(i + 1), u(rng));
      total += entries.back().second;
    }
    for (auto& e : entries) e.second /= total;
    const ScoreVector raw(ScoreFlavor::kRawBT, entries);
    const auto once = normalize(raw);
    EXPECT_EQ(once.ascending_order(), raw.ascending_order());
    const auto twice = normalize(once);
    for (std::size_t i = 0; i < size; ++i) {
      EXPECT_NEAR(twice.values()[i], once.values()[i], 1e-15);
    }
  }
}

}  // namespace
}  // namespace crowdc::btl
