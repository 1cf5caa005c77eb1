#include "crowdc/core.hpp"

#include <random>
#include <sstream>

#include "gtest/gtest.h"

namespace crowdc {
namespace {

TEST(Comparison, RejectsSelfComparison) {
  EXPECT_THROW(Comparison("s", 3, 3, 3), InvalidComparison);
}

TEST(Comparison, RejectsChoiceOutsidePair) {
  EXPECT_THROW(Comparison("s", 1, 2, 5), InvalidComparison);
}

TEST(Comparison, LoserIsTheOtherItem) {
  Comparison c("s", 4, 9, 9);
  EXPECT_EQ(c.loser(), 4);
  EXPECT_EQ(Comparison("s", 4, 9, 4).loser(), 9);
}

TEST(ScoreVector, RawMustLieOnSimplex) {
  EXPECT_NO_THROW(ScoreVector(ScoreFlavor::kRawBT, {{1, 0.25}, {2, 0.75}}));
  EXPECT_THROW(ScoreVector(ScoreFlavor::kRawBT, {{1, 0.5}, {2, 0.75}}), InvalidScores);
  EXPECT_THROW(ScoreVector(ScoreFlavor::kRawBT, {{1, 0.0}, {2, 1.0}}), InvalidScores);
}

TEST(ScoreVector, NormalizedFlavorsSpanUnitInterval) {
  for (auto flavor : {ScoreFlavor::kNormalized, ScoreFlavor::kWithinGroup,
                      ScoreFlavor::kOutOfGroup, ScoreFlavor::kFinal}) {
    EXPECT_NO_THROW(ScoreVector(flavor, {{1, 0.0}, {2, 0.3}, {3, 1.0}}));
    EXPECT_THROW(ScoreVector(flavor, {{1, 0.1}, {2, 1.0}}), InvalidScores);
    EXPECT_THROW(ScoreVector(flavor, {{1, 0.0}, {2, 1.5}}), InvalidScores);
    // The degenerate-fit fallback.
    EXPECT_NO_THROW(ScoreVector(flavor, {{1, 0.5}, {2, 0.5}}));
  }
}

TEST(ScoreVector, RejectsDuplicateItems) {
  EXPECT_THROW(ScoreVector(ScoreFlavor::kNormalized, {{1, 0.0}, {1, 1.0}}), InvalidScores);
}

TEST(ScoreVector, AscendingOrderBreaksTiesByIndex) {
  ScoreVector s(ScoreFlavor::kNormalized, {{7, 0.2}, {3, 0.2}, {5, 0.0}, {1, 1.0}});
  EXPECT_EQ(s.ascending_order(), (std::vector<ItemIndex>{5, 3, 7, 1}));
  EXPECT_DOUBLE_EQ(s.at(7), 0.2);
  EXPECT_THROW(s.at(2), std::out_of_range);
}

TEST(Parameters, OperatingPointIsValid) {
  EXPECT_NO_THROW(validate_parameters({100, 5, 0.8, 2, 12}));
}

TEST(Parameters, EachViolationIsNamed) {
  auto violation = [](Parameters p) {
    try {
      validate_parameters(p);
    } catch (const ParameterError& e) {
      return std::optional(e.violation());
    }
    return std::optional<ParameterViolation>{};
  };
  EXPECT_EQ(violation({50, 1, 0.6, 1, 4}), ParameterViolation::kGroupCountTooSmall);
  EXPECT_EQ(violation({50, 1, 0.6, 20, 2}), ParameterViolation::kGroupCountTooLarge);
  EXPECT_EQ(violation({2, 1, 0.6, 2, 2}), ParameterViolation::kTooFewItems);
  EXPECT_EQ(violation({100, 1, 0.6, 3, 2}), ParameterViolation::kIndivisibleGroupSize);
  EXPECT_EQ(violation({100, 1, 0.6, 2, 1}), ParameterViolation::kPivotCountTooSmall);
  EXPECT_EQ(violation({50, 1, 0.6, 5, 12}), ParameterViolation::kPivotCountTooLarge);
  EXPECT_EQ(violation({100, 0, 0.6, 2, 4}), ParameterViolation::kComparisonsPerPairTooSmall);
  EXPECT_EQ(violation({100, 1, 0.5, 2, 4}), ParameterViolation::kCorrectRateOutOfRange);
  EXPECT_EQ(violation({100, 1, 1.01, 2, 4}), ParameterViolation::kCorrectRateOutOfRange);
  EXPECT_EQ(violation({100, 1, 1.0, 2, 4}), std::nullopt);
}

TEST(Parameters, GroupsOfThreeAreTheSmallestAllowed) {
  EXPECT_EQ(find_violation({6, 1, 1.0, 2, 2}), std::nullopt);
  EXPECT_EQ(find_violation({6, 1, 1.0, 2, 3}), std::nullopt);
  EXPECT_EQ(find_violation({8, 1, 1.0, 4, 2}), ParameterViolation::kGroupCountTooLarge);
}

TEST(Partition, CheckDetectsBrokenInvariants) {
  const std::vector<ItemIndex> items{1, 2, 3, 4, 5, 6};
  Partition ok{{{1, 3, 5}, {2, 4, 6}}, {}};
  EXPECT_EQ(check_partition(ok, items), std::nullopt);

  Partition uneven{{{1, 3}, {2, 4, 5, 6}}, {}};
  EXPECT_TRUE(check_partition(uneven, items).has_value());

  Partition overlapping{{{1, 3, 5}, {1, 4, 6}}, {}};
  EXPECT_TRUE(check_partition(overlapping, items).has_value());

  Partition foreign_pivot{{{1, 3, 5}, {2, 4, 6}}, {{1, 5}, {2, 3}}};
  EXPECT_TRUE(check_partition(foreign_pivot, items).has_value());
}

TEST(ExperimentRecord, ArithmeticIdentitiesHold) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 300);
    const int t = 1 + static_cast<int>(rng() % 10);
    const std::int64_t baseline_total = choose2(n) * t;
    const std::int64_t pairs = static_cast<std::int64_t>(rng() % (choose2(n) + 1));
    const auto rec = make_record(Method::kCrowDC, {n, t, 0.8, 2, 2}, 1, 2, pairs, 0.5, 0.9,
                                 baseline_total);
    EXPECT_EQ(rec.total_comparisons, rec.unique_pairs * t);
    EXPECT_DOUBLE_EQ(rec.reduction_ratio,
                     1.0 - static_cast<double>(rec.total_comparisons) /
                               static_cast<double>(baseline_total));
  }
}

TEST(ComparisonCsv, RoundTripsRandomSets) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Comparison> comparisons;
    const int count = static_cast<int>(rng() % 50);
    for (int i = 0; i < count; ++i) {
      const ItemIndex a = 1 + static_cast<ItemIndex>(rng() % 40);
      ItemIndex b = 1 + static_cast<ItemIndex>(rng() % 40);
      if (b == a) b = a + 1;
      comparisons.emplace_back("w" + std::to_string(rng() % 7), a, b, rng() % 2 ? a : b);
    }
    std::stringstream buffer;
    write_comparisons_csv(buffer, comparisons);
    EXPECT_EQ(read_comparisons_csv(buffer), comparisons);
  }
}

TEST(ComparisonCsv, RejectsBadInput) {
  auto read = [](const std::string& text) {
    std::istringstream in(text);
    return read_comparisons_csv(in);
  };
  EXPECT_THROW(read(""), CsvError);
  EXPECT_THROW(read("id,x,y,z\n"), CsvError);
  EXPECT_THROW(read("subject_id,a,b,chosen\ns,1,2\n"), CsvError);
  EXPECT_THROW(read("subject_id,a,b,chosen\ns,1,2,3\n"), CsvError);
  EXPECT_THROW(read("subject_id,a,b,chosen\ns,0,2,2\n"), CsvError);
  EXPECT_THROW(read("subject_id,a,b,chosen\ns,1,two,1\n"), CsvError);
  EXPECT_EQ(read("subject_id,a,b,chosen\r\ns,1,2,2\r\n\n").size(), 1u);
}

}  // namespace
}  // namespace crowdc
