#include "hransac/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "hransac/errors.hpp"
#include "hransac/geometry.hpp"
#include "hransac/random.hpp"

namespace hransac {

namespace {

constexpr std::uint64_t kShardSize = 1u << 14;

struct Tally {
  std::uint64_t c0 = 0, c2 = 0, c4 = 0, degenerate = 0;
};

Tally run_shard(std::uint64_t seed, std::uint64_t shard, std::uint64_t count) {
  Rng rng = make_stream(seed, shard);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  Tally t;
  for (std::uint64_t i = 0; i < count; ++i) {
    for (;;) {
      Quadrilateral q;
      for (auto& p : q) p = {u01(rng), u01(rng)};
      const auto c = classify_quad(q);
      if (c == QuadClass::Degenerate) {
        ++t.degenerate;
        continue;
      }
      if (c == QuadClass::Convex) {
        ++t.c4;
      } else if (c == QuadClass::ConcaveSimple) {
        ++t.c2;
      } else {
        ++t.c0;
      }
      break;
    }
  }
  return t;
}

double factorial(std::size_t n) noexcept {
  double f = 1.0;
  for (std::size_t i = 2; i <= n; ++i) f *= static_cast<double>(i);
  return f;
}

}  // namespace

double binomial(std::size_t n, std::size_t k) noexcept {
  if (k > n) return 0.0;
  k = std::min(k, n - k);
  double c = 1.0;
  for (std::size_t i = 1; i <= k; ++i) {
    c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
  }
  return std::round(c);
}

QDistribution estimate_q_distribution(std::uint64_t samples, std::uint64_t seed, int threads) {
  if (samples == 0) throw std::invalid_argument("estimate_q_distribution: samples must be positive");
  const std::uint64_t shards = (samples + kShardSize - 1) / kShardSize;
  std::vector<Tally> tallies(shards);

  const auto shard_count = static_cast<std::int64_t>(shards);
#pragma omp parallel for num_threads(std::max(1, threads)) schedule(dynamic, 1)
  for (std::int64_t s = 0; s < shard_count; ++s) {
    const auto us = static_cast<std::uint64_t>(s);
    const std::uint64_t count = std::min(kShardSize, samples - us * kShardSize);
    tallies[us] = run_shard(seed, us, count);
  }

  QDistribution d;
  for (const auto& t : tallies) {
    d.count0 += t.c0;
    d.count2 += t.c2;
    d.count4 += t.c4;
    d.degenerate_redraws += t.degenerate;
  }
  d.samples = samples;
  const double n = static_cast<double>(samples);
  d.p0 = static_cast<double>(d.count0) / n;
  d.p2 = static_cast<double>(d.count2) / n;
  d.p4 = static_cast<double>(d.count4) / n;
  return d;
}

double selection_probability(const IterationQuery& q) {
  if (q.e1 > 4) throw InvalidQuery("e1 must lie in [0, 4]");
  if (q.k1 > std::min(q.n1_a, q.n1_b) || q.k2 > std::min(q.n2_a, q.n2_b)) {
    throw InvalidQuery("correspondence counts exceed the class sizes");
  }
  if (!(q.p_r > 0.0 && q.p_r < 1.0)) throw InvalidQuery("p_r must lie in (0, 1)");
  if (!(q.gate_factor > 0.0 && q.gate_factor <= 1.0)) throw InvalidQuery("gate_factor must lie in (0, 1]");
  const std::size_t e1 = q.e1, e2 = 4 - q.e1;
  if (q.k1 < e1 || q.k2 < e2) return 0.0;

  const double hit_a = binomial(q.k1, e1) / binomial(q.n1_a, e1) * binomial(q.k2, e2) / binomial(q.n2_a, e2);
  const double hit_b = binomial(q.k1, e1) / binomial(q.n1_b, e1) * binomial(q.k2, e2) / binomial(q.n2_b, e2);
  const double orderings = binomial(q.k1, e1) * binomial(q.k2, e2) * factorial(e1) * factorial(e2);
  return hit_a * hit_b / (q.gate_factor * orderings);
}

IterationCount expected_iterations(const IterationQuery& q) {
  const double p0 = selection_probability(q);
  if (p0 <= 0.0) return std::nullopt;
  if (p0 >= 1.0) return 1;
  const double n = std::round(std::log10(1.0 - q.p_r) / std::log10(1.0 - p0));
  return static_cast<std::uint64_t>(n);
}

std::vector<CurveRow> iteration_curve(const SweepSpec& spec) {
  if (spec.step == 0 || spec.min_points > spec.max_points) {
    throw InvalidQuery("sweep range is empty");
  }
  if (spec.k_total < 4) throw InvalidQuery("sweep needs at least 4 correspondences");
  std::vector<CurveRow> rows;
  const std::size_t start = std::max(spec.min_points, spec.k_total);
  for (std::size_t n = start; n <= spec.max_points; n += spec.step) {
    CurveRow single;
    single.points_per_image = n;
    single.classes = 1;
    single.query = {n, 0, n, 0, spec.k_total, 0, 4, spec.p_r, spec.gate_factor};
    single.n_iter = expected_iterations(single.query);
    rows.push_back(single);

    CurveRow two;
    two.points_per_image = n;
    two.classes = 2;
    const std::size_t n1 = (n + 1) / 2, n2 = n / 2;
    const std::size_t k1 = (spec.k_total + 1) / 2, k2 = spec.k_total / 2;
    // e1 follows the correspondence split, capped so the sample fits in 4.
    const std::size_t e1 = std::min<std::size_t>(2, k1);
    two.query = {n1, n2, n1, n2, std::min(k1, n1), std::min(k2, n2), e1, spec.p_r, spec.gate_factor};
    two.n_iter = expected_iterations(two.query);
    rows.push_back(two);
  }
  return rows;
}

}  // namespace hransac
