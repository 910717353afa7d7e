#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hransac/analysis.hpp"
#include "hransac/geometry.hpp"
#include "hransac/sampling.hpp"

namespace hransac {

/// Ground-truth correspondence between point index_a of A and index_b of B.
struct TruthPair {
  std::size_t index_a = 0;
  std::size_t index_b = 0;

  friend bool operator==(const TruthPair&, const TruthPair&) = default;
};

struct SceneParams {
  /// Points per class in each image. Unlabeled scenes use entry 0 only.
  std::array<std::size_t, 2> points_a{3, 3};
  std::array<std::size_t, 2> points_b{3, 3};
  /// Planted correspondences per class.
  std::array<std::size_t, 2> correspondences{2, 2};
  double noise_sigma = 0.0;  // pixels, applied to the A side
  Extent extent{720.0, 576.0};
  /// Largest corner displacement of the ground-truth map, as a fraction of
  /// the image width (x) and height (y).
  double max_displacement_x = 1.5;
  double max_displacement_y = 0.5;
  /// 0 places points uniformly; otherwise around this many Gaussian clusters.
  std::size_t clusters = 0;
  double cluster_sigma = 20.0;
  bool labeled = true;
};

/// Planted instance: truth_h maps B onto A.
struct SyntheticScene {
  Homography truth_h;
  PointSet set_a;
  PointSet set_b;
  std::vector<TruthPair> truth_pairs;  // sorted by index_a
  SceneParams params;
  std::uint64_t seed = 0;
};

/// Throws InfeasibleParams when fewer than 4 correspondences are planted,
/// a class plants more correspondences than it has points, or the
/// geometry settings are not positive.
void validate(const SceneParams& params);

SyntheticScene generate_scene(const SceneParams& params, std::uint64_t seed);

/// Expected-iteration query matching the scene counts, with e1 the rounded
/// proportional share of the sample.
IterationQuery scene_query(const SceneParams& params, double p_r = 0.95,
                           double gate_factor = kGateFactor);

/// True when every positional pair of the sample is a ground-truth pair.
bool is_planted_sample(const Sample& sample, std::span<const TruthPair> truth) noexcept;

}  // namespace hransac
