#include <gtest/gtest.h>

#include "hransac/analysis.hpp"
#include "hransac/errors.hpp"
#include "oracles.hpp"

using namespace hransac;

namespace {

IterationQuery single_class(std::size_t n, std::size_t k = 4) { return {n, 0, n, 0, k, 0, 4}; }
IterationQuery two_class(std::size_t n, std::size_t k = 2) { return {n, n, n, n, k, k, 2}; }

// Four uniform points in a square are in convex position with probability
// 25/36. A convex set has three cyclic orderings, one convex and two
// crossing; a triangle with an interior point has three simple concave ones.
constexpr double kP4 = 25.0 / 108.0;
constexpr double kP2 = 11.0 / 36.0;
constexpr double kP0 = 50.0 / 108.0;

}  // namespace

TEST(Binomial, SmallValues) {
  EXPECT_EQ(binomial(6, 4), 15.0);
  EXPECT_EQ(binomial(10, 0), 1.0);
  EXPECT_EQ(binomial(3, 4), 0.0);
  EXPECT_EQ(binomial(0, 0), 1.0);
}

TEST(ExpectedIterations, KnownOperatingPoints) {
  EXPECT_EQ(expected_iterations(single_class(6)), 5822u);
  EXPECT_EQ(expected_iterations(two_class(3)), 348u);
  EXPECT_EQ(expected_iterations(single_class(8)), 126826u);
  EXPECT_EQ(expected_iterations(two_class(4)), 5589u);
  // log10(0.05) / log10(1 - p0) = 1141444.40 for ten points per image.
  EXPECT_EQ(expected_iterations(single_class(10)), 1141444u);
  EXPECT_EQ(expected_iterations(two_class(5)), 43137u);
}

TEST(ExpectedIterations, CompleteCorrespondenceIsCheap) {
  // Four points, all corresponding: p0 = 1 / (0.36 * 24).
  const auto n = expected_iterations(single_class(4));
  ASSERT_TRUE(n.has_value());
  const double p0 = 1.0 / (0.36 * 24.0);
  EXPECT_EQ(*n, static_cast<std::uint64_t>(std::round(std::log10(0.05) / std::log10(1.0 - p0))));
}

TEST(ExpectedIterations, UnboundedWhenSampleCannotBePlanted) {
  EXPECT_FALSE(expected_iterations({3, 3, 3, 3, 1, 3, 2}).has_value());
  EXPECT_FALSE(expected_iterations({5, 0, 5, 0, 3, 0, 4}).has_value());
  EXPECT_EQ(selection_probability({3, 3, 3, 3, 1, 3, 2}), 0.0);
}

TEST(ExpectedIterations, GateFactorOneNeverNeedsFewerIterations) {
  for (std::size_t n = 4; n <= 12; ++n) {
    auto q = two_class(n);
    const auto gated = *expected_iterations(q);
    q.gate_factor = 1.0;
    const auto plain = *expected_iterations(q);
    EXPECT_GE(plain, gated);
    EXPECT_NEAR(selection_probability(two_class(n)) * 0.36, selection_probability(q), 1e-15);
    if (n >= 6) EXPECT_NEAR(static_cast<double>(gated) / static_cast<double>(plain), 0.36, 0.01);
  }
}

TEST(ExpectedIterations, InvalidQueries) {
  EXPECT_THROW(expected_iterations({3, 3, 3, 3, 4, 2, 2}), InvalidQuery);
  EXPECT_THROW(expected_iterations({3, 3, 3, 3, 2, 2, 5}), InvalidQuery);
  auto q = two_class(3);
  q.p_r = 1.0;
  EXPECT_THROW(expected_iterations(q), InvalidQuery);
  q.p_r = 0.0;
  EXPECT_THROW(expected_iterations(q), InvalidQuery);
  q = two_class(3);
  q.gate_factor = 0.0;
  EXPECT_THROW(expected_iterations(q), InvalidQuery);
  q.gate_factor = 1.5;
  EXPECT_THROW(expected_iterations(q), InvalidQuery);
}

TEST(ExpectedIterations, MonotoneInPointsAndCorrespondences) {
  for (std::size_t e1 = 0; e1 <= 4; ++e1) {
    for (std::size_t n1 = 0; n1 <= 8; ++n1) {
      for (std::size_t n2 = 0; n2 <= 8; ++n2) {
        for (std::size_t k1 = e1; k1 <= n1; ++k1) {
          for (std::size_t k2 = 4 - e1; k2 <= n2; ++k2) {
            const IterationQuery q{n1, n2, n1, n2, k1, k2, e1};
            const auto base = *expected_iterations(q);
            auto more_a = q;
            ++more_a.n1_a;
            ASSERT_GE(*expected_iterations(more_a), base);
            auto more_b = q;
            ++more_b.n2_b;
            ASSERT_GE(*expected_iterations(more_b), base);
            if (k1 < n1) {
              auto more_k = q;
              ++more_k.k1;
              ASSERT_LE(*expected_iterations(more_k), base);
            }
            if (k2 < n2) {
              auto more_k = q;
              ++more_k.k2;
              ASSERT_LE(*expected_iterations(more_k), base);
            }
          }
        }
      }
    }
  }
}

TEST(SelectionProbability, AgreesWithExhaustiveEnumeration) {
  int checked = 0;
  for (std::size_t e1 = 0; e1 <= 4; ++e1) {
    for (std::size_t n1a = e1; n1a <= 4; ++n1a) {
      for (std::size_t n2a = 4 - e1; n2a <= 4; ++n2a) {
        const std::size_t n1b = std::min<std::size_t>(n1a + 1, 5), n2b = n2a;
        if (n1a + n2a > 6) continue;
        for (std::size_t k1 = e1; k1 <= n1a; ++k1) {
          for (std::size_t k2 = 4 - e1; k2 <= n2a; ++k2) {
            IterationQuery q{n1a, n2a, n1b, n2b, k1, k2, e1};
            q.gate_factor = 1.0;
            const double want = oracle::enumerate_selection_probability(q);
            ASSERT_GT(want, 0.0);
            ASSERT_NEAR(selection_probability(q) / want, 1.0, 0.02);
            ++checked;
          }
        }
      }
    }
  }
  EXPECT_GT(checked, 20);
}

TEST(IterationCurve, TwoClassNeverWorseThanSingleClass) {
  const auto rows = iteration_curve({4, 30, 1, 4});
  ASSERT_EQ(rows.size(), 2u * 27u);
  for (std::size_t r = 0; r < rows.size(); r += 2) {
    ASSERT_EQ(rows[r].classes, 1);
    ASSERT_EQ(rows[r + 1].classes, 2);
    ASSERT_EQ(rows[r].points_per_image, rows[r + 1].points_per_image);
    ASSERT_GE(*rows[r].n_iter, *rows[r + 1].n_iter);
  }
}

TEST(IterationCurve, ContainsKnownOperatingPoints) {
  const auto rows = iteration_curve({6, 10, 2, 4});
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0].n_iter, 5822u);
  EXPECT_EQ(rows[1].n_iter, 348u);
  EXPECT_EQ(rows[2].n_iter, 126826u);
  EXPECT_EQ(rows[3].n_iter, 5589u);
  EXPECT_EQ(rows[4].n_iter, 1141444u);
  EXPECT_EQ(rows[5].n_iter, 43137u);
  // Roughly twentyfold saving between the two families at these sizes.
  for (std::size_t r = 0; r < rows.size(); r += 2)
    EXPECT_GT(static_cast<double>(*rows[r].n_iter) / static_cast<double>(*rows[r + 1].n_iter), 15.0);
}

TEST(IterationCurve, RejectsEmptySweeps) {
  EXPECT_THROW(iteration_curve({10, 5, 1, 4}), InvalidQuery);
  EXPECT_THROW(iteration_curve({4, 10, 0, 4}), InvalidQuery);
  EXPECT_THROW(iteration_curve({4, 10, 1, 3}), InvalidQuery);
}

TEST(QDistribution, MatchesAnalyticValues) {
  const auto d = estimate_q_distribution(200000, 7);
  EXPECT_EQ(d.samples, 200000u);
  EXPECT_EQ(d.count0 + d.count2 + d.count4, d.samples);
  EXPECT_NEAR(d.p0 + d.p2 + d.p4, 1.0, 1e-9);
  EXPECT_NEAR(d.p4, kP4, 0.005);
  EXPECT_NEAR(d.p2, kP2, 0.005);
  EXPECT_NEAR(d.p0, kP0, 0.005);
  EXPECT_NEAR(d.gate_survival(), kP0 * kP0 + kP2 * kP2 + kP4 * kP4, 0.005);
}

TEST(QDistribution, NearPublishedRoundedValues) {
  for (std::uint64_t seed : {1u, 2u}) {
    const auto d = estimate_q_distribution(100000, seed);
    EXPECT_NEAR(d.p0, 0.46, 0.02);
    EXPECT_NEAR(d.p2, 0.30, 0.02);
    EXPECT_NEAR(d.p4, 0.24, 0.02);
    EXPECT_NEAR(d.gate_survival(), 0.36, 0.02);
  }
  const auto a = estimate_q_distribution(100000, 1), b = estimate_q_distribution(100000, 2);
  EXPECT_NE(a.count4, b.count4);
}

TEST(QDistribution, DeterministicAcrossThreadCounts) {
  const auto one = estimate_q_distribution(50000, 99, 1);
  const auto four = estimate_q_distribution(50000, 99, 4);
  EXPECT_EQ(one.count0, four.count0);
  EXPECT_EQ(one.count2, four.count2);
  EXPECT_EQ(one.count4, four.count4);
  EXPECT_THROW(estimate_q_distribution(0, 1), std::invalid_argument);
}
