#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace hransac {

/// Fraction of random quadrilateral pairs expected to share a Q value.
inline constexpr double kGateFactor = 0.36;

/// Empirical Q-value frequencies of quadrilaterals with four i.i.d. uniform
/// vertices in the unit square.
struct QDistribution {
  double p0 = 0.0;
  double p2 = 0.0;
  double p4 = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t count0 = 0;
  std::uint64_t count2 = 0;
  std::uint64_t count4 = 0;
  std::uint64_t degenerate_redraws = 0;

  /// p0^2 + p2^2 + p4^2: chance that two independent quadrilaterals match.
  double gate_survival() const noexcept { return p0 * p0 + p2 * p2 + p4 * p4; }
};

/// Monte Carlo tally over `samples` quadrilaterals. Work is split in fixed
/// shards with seeds derived from (seed, shard), so `threads` never changes
/// the result.
QDistribution estimate_q_distribution(std::uint64_t samples, std::uint64_t seed, int threads = 1);

/// Counts and correspondences for the expected-iteration estimate. Single
/// class problems use n2_a = n2_b = k2 = 0 and e1 = 4.
struct IterationQuery {
  std::size_t n1_a = 0;
  std::size_t n2_a = 0;
  std::size_t n1_b = 0;
  std::size_t n2_b = 0;
  std::size_t k1 = 0;
  std::size_t k2 = 0;
  std::size_t e1 = 4;
  double p_r = 0.95;
  double gate_factor = kGateFactor;
};

/// nullopt means unbounded: the correct sample can never be drawn.
using IterationCount = std::optional<std::uint64_t>;

/// Per-iteration probability of drawing the correct ordered 4-pair sample,
/// boosted by 1 / gate_factor. Returns 0 when k1 < e1 or k2 < 4 - e1.
/// Throws InvalidQuery on inconsistent counts or probabilities.
double selection_probability(const IterationQuery& q);

/// round(log10(1 - p_r) / log10(1 - p0)), half away from zero.
IterationCount expected_iterations(const IterationQuery& q);

/// Sweep over points per image for a single-class and a two-class family
/// with the same total correspondences.
struct SweepSpec {
  std::size_t min_points = 4;
  std::size_t max_points = 30;
  std::size_t step = 1;
  std::size_t k_total = 4;
  double p_r = 0.95;
  double gate_factor = kGateFactor;
};

struct CurveRow {
  std::size_t points_per_image = 0;
  int classes = 1;
  IterationQuery query;
  IterationCount n_iter;
};

/// Rows ordered by points per image, single-class row first. The two-class
/// family splits points and correspondences as evenly as possible (larger
/// half in class 1) and an even sample split, e1 = 2.
std::vector<CurveRow> iteration_curve(const SweepSpec& spec);

/// Binomial coefficient as a double; 0 when k > n.
double binomial(std::size_t n, std::size_t k) noexcept;

}  // namespace hransac
