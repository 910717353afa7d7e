#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>

#include "generators.hpp"
#include "hransac/sampling.hpp"
#include "oracles.hpp"

using namespace hransac;

namespace {

PointSet labeled_set(std::size_t n1, std::size_t n2, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<LabeledPoint> pts;
  for (std::size_t i = 0; i < n1 + n2; ++i)
    pts.push_back({hransac::testing::uniform_point(rng), i < n1 ? ClassLabel::Class1 : ClassLabel::Class2});
  std::shuffle(pts.begin(), pts.end(), rng);
  return PointSet(std::move(pts));
}

}  // namespace

TEST(PointSet, SlotsFollowLabels) {
  const PointSet s({{{0, 0}, ClassLabel::Class2}, {{1, 0}, ClassLabel::Class1}, {{2, 0}, ClassLabel::Class2}});
  EXPECT_TRUE(s.labeled());
  EXPECT_EQ(s.n_class1(), 1u);
  EXPECT_EQ(s.n_class2(), 2u);
  EXPECT_EQ(std::vector<std::size_t>(s.slot(0).begin(), s.slot(0).end()), (std::vector<std::size_t>{1}));
  EXPECT_EQ(std::vector<std::size_t>(s.slot(1).begin(), s.slot(1).end()), (std::vector<std::size_t>{0, 2}));
}

TEST(PointSet, UnlabeledSetUsesSlotZero) {
  const std::vector<Point2> pts{{0, 0}, {1, 1}, {2, 5}};
  const auto s = PointSet::unlabeled(pts);
  EXPECT_FALSE(s.labeled());
  EXPECT_EQ(s.n_class1(), 3u);
  EXPECT_EQ(s.n_class2(), 0u);
  EXPECT_EQ(s.bounding_extent(), (Extent{2, 5}));
}

TEST(PointSet, RejectsBadInput) {
  EXPECT_THROW(PointSet({{{0, 0}, ClassLabel::Class1}, {{1, 0}, ClassLabel::Unlabeled}}), std::invalid_argument);
  EXPECT_THROW(PointSet({{{0, std::nan("")}, ClassLabel::Class1}}), std::invalid_argument);
  EXPECT_THROW(PointSet({{{0, 0}, ClassLabel::Class1}}, Extent{0, 10}), std::invalid_argument);
}

TEST(Eligibility, TakesPerClassMinimum) {
  const auto e = eligibility(labeled_set(3, 3, 1), labeled_set(3, 3, 2));
  EXPECT_EQ(e.n1, 3u);
  EXPECT_EQ(e.n2, 3u);
  EXPECT_TRUE(e.eligible);

  const auto f = eligibility(labeled_set(1, 1, 1), labeled_set(5, 5, 2));
  EXPECT_EQ(f.n1 + f.n2, 2u);
  EXPECT_FALSE(f.eligible);

  const auto g = eligibility(labeled_set(4, 0, 1), labeled_set(0, 4, 2));
  EXPECT_FALSE(g.eligible);
}

TEST(Eligibility, MixedLabelingIsIneligible) {
  const std::vector<Point2> pts{{0, 0}, {1, 0}, {2, 1}, {0, 3}, {4, 4}};
  EXPECT_FALSE(eligibility(PointSet::unlabeled(pts), labeled_set(5, 5, 3)).eligible);
  EXPECT_TRUE(eligibility(PointSet::unlabeled(pts), PointSet::unlabeled(pts)).eligible);
}

TEST(RouletteAllocation, SingleClassForcesAllSlots) {
  Rng rng(1);
  for (auto rule : {AllocationRule::Proportional, AllocationRule::PerSlot}) {
    EXPECT_EQ(roulette_allocation(6, 0, rng, rule), (SampleAllocation{4, 0}));
    EXPECT_EQ(roulette_allocation(0, 6, rng, rule), (SampleAllocation{0, 4}));
  }
  EXPECT_THROW(roulette_allocation(2, 1, rng), std::invalid_argument);
}

TEST(RouletteAllocation, AlwaysFeasibleForSmallCounts) {
  Rng rng(2);
  for (std::size_t n1 = 0; n1 <= 30; ++n1) {
    for (std::size_t n2 = 0; n2 <= 30; ++n2) {
      if (n1 + n2 < 4) continue;
      for (auto rule : {AllocationRule::Proportional, AllocationRule::PerSlot}) {
        for (int r = 0; r < 20; ++r) {
          const auto s = roulette_allocation(n1, n2, rng, rule);
          ASSERT_EQ(s.e1 + s.e2, 4u);
          ASSERT_LE(s.e1, n1);
          ASSERT_LE(s.e2, n2);
        }
      }
    }
  }
}

TEST(RouletteAllocation, ProportionalMeanMatchesShare) {
  Rng rng(3);
  for (auto [n1, n2] : {std::pair<std::size_t, std::size_t>{3, 3}, {5, 3}, {10, 2}, {7, 4}}) {
    const double target = 4.0 * static_cast<double>(n1) / static_cast<double>(n1 + n2);
    const int trials = 40000;
    double sum = 0.0;
    std::set<std::size_t> seen;
    for (int i = 0; i < trials; ++i) {
      const auto s = roulette_allocation(n1, n2, rng);
      sum += static_cast<double>(s.e1);
      seen.insert(s.e1);
    }
    EXPECT_NEAR(sum / trials, target, 0.02) << n1 << "/" << n2;
    EXPECT_LE(*seen.rbegin() - *seen.begin(), 1u);
  }
}

TEST(RouletteAllocation, PerSlotMatchesExactDistribution) {
  Rng rng(4);
  for (auto [n1, n2] : {std::pair<std::size_t, std::size_t>{3, 3}, {2, 5}, {1, 8}}) {
    const auto want = oracle::per_slot_distribution(n1, n2);
    std::array<double, 5> got{};
    const int trials = 60000;
    for (int i = 0; i < trials; ++i) got[roulette_allocation(n1, n2, rng, AllocationRule::PerSlot).e1] += 1.0 / trials;
    for (std::size_t e = 0; e <= 4; ++e) EXPECT_NEAR(got[e], want[e], 0.01) << n1 << "/" << n2 << " e1=" << e;
  }
}

TEST(DrawSample, BlocksRespectClassesAndAreDistinct) {
  const auto a = labeled_set(4, 5, 10), b = labeled_set(6, 3, 11);
  Rng rng(5);
  for (int n = 0; n < 2000; ++n) {
    const auto alloc = roulette_allocation(4, 3, rng);
    const auto s = draw_sample(a, b, alloc, rng);
    ASSERT_EQ(s.allocation, alloc);
    ASSERT_EQ(std::set<std::size_t>(s.a.begin(), s.a.end()).size(), 4u);
    ASSERT_EQ(std::set<std::size_t>(s.b.begin(), s.b.end()).size(), 4u);
    for (std::size_t i = 0; i < 4; ++i) {
      const auto want = i < alloc.e1 ? ClassLabel::Class1 : ClassLabel::Class2;
      ASSERT_EQ(a[s.a[i]].label, want);
      ASSERT_EQ(b[s.b[i]].label, want);
    }
  }
}

TEST(DrawSample, OrderedBlocksAreUniform) {
  const std::vector<Point2> pts{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {5, 5}};
  const auto set = PointSet::unlabeled(pts);
  Rng rng(6);
  std::map<std::array<std::size_t, 4>, int> counts;
  const int trials = 120000;
  for (int n = 0; n < trials; ++n) ++counts[draw_sample(set, set, {4, 0}, rng).a];
  EXPECT_EQ(counts.size(), 120u);  // 5 * 4 * 3 * 2 ordered arrangements
  for (const auto& [k, c] : counts) EXPECT_NEAR(c, trials / 120.0, 5 * std::sqrt(trials / 120.0));
}

TEST(DrawSample, RejectsInfeasibleAllocation) {
  const auto a = labeled_set(2, 5, 1), b = labeled_set(5, 5, 2);
  Rng rng(7);
  EXPECT_THROW(draw_sample(a, b, {3, 1}, rng), std::invalid_argument);
  EXPECT_THROW(draw_sample(a, b, {2, 1}, rng), std::invalid_argument);
}

TEST(QGate, Examples) {
  const Quadrilateral square{Point2{0, 0}, Point2{1, 0}, Point2{1, 1}, Point2{0, 1}};
  const Quadrilateral bowtie{Point2{0, 0}, Point2{1, 1}, Point2{1, 0}, Point2{0, 1}};
  const Quadrilateral dart{Point2{0, 0}, Point2{4, 0}, Point2{1, 1}, Point2{0, 4}};
  const Quadrilateral flat{Point2{0, 0}, Point2{1, 0}, Point2{2, 0}, Point2{0, 1}};
  EXPECT_TRUE(q_gate(square, square));
  EXPECT_TRUE(q_gate(dart, dart));
  EXPECT_FALSE(q_gate(square, bowtie));
  EXPECT_FALSE(q_gate(square, dart));
  EXPECT_FALSE(q_gate(flat, flat));
  EXPECT_FALSE(q_gate(square, flat));
}

TEST(QGate, ProjectiveImageOfSampleAlwaysPasses) {
  Rng rng(8);
  for (int n = 0; n < 2000; ++n) {
    const auto m = hransac::testing::random_projective(rng);
    const auto q = hransac::testing::uniform_quad(rng);
    Quadrilateral mapped;
    for (std::size_t i = 0; i < 4; ++i) mapped[i] = hransac::testing::project(m, q[i]);
    ASSERT_TRUE(q_gate(q, mapped));
  }
}
