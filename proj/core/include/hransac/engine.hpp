#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "hransac/geometry.hpp"
#include "hransac/matching.hpp"
#include "hransac/sampling.hpp"

namespace hransac {

inline constexpr std::uint64_t kMaxIterationsCap = 5'000'000;

/// Draw limit per budgeted hypothesis when RansacConfig::max_draws is 0.
inline constexpr std::uint64_t kDrawsPerHypothesis = 32;

struct RansacConfig {
  double lambda = kDefaultLambda;
  /// Budget of gate-passing hypotheses. nullopt selects
  /// default_max_iterations().
  std::optional<std::uint64_t> max_iterations;
  /// Hard limit on sample draws, gate rejections included. 0 selects
  /// kDrawsPerHypothesis times the budget.
  std::uint64_t max_draws = 0;
  /// Inlier count (seed pairs included) that ends the run early.
  std::size_t exit_inliers = 6;
  std::uint64_t seed = 0;
  bool refit_on_inliers = true;
  MatchingRule matching_rule = MatchingRule::OneToOne;
  AllocationRule allocation_rule = AllocationRule::Proportional;
  /// Image B size for the corner plausibility test. Falls back to the
  /// extent stored with set B, then to its bounding box.
  std::optional<Extent> image_b_extent;
  /// Worker threads for hypothesis evaluation. Never changes the result.
  int threads = 1;
};

enum class RunStatus { EarlyExit, BestEffortAtExhaustion, NoModelFound, Ineligible };

std::string_view to_string(RunStatus s) noexcept;

struct RansacResult {
  RunStatus status = RunStatus::NoModelFound;
  std::optional<Homography> homography;
  std::vector<InlierPair> inliers;
  Eligibility eligibility;
  MatchThreshold threshold;
  Extent extent;
  std::uint64_t budget = 0;
  /// Sample draws, including draws rejected by the Q gate.
  std::uint64_t iterations_used = 0;
  /// Draws that passed the gate; bounded by `budget`.
  std::uint64_t hypotheses_evaluated = 0;
  std::uint64_t q_gate_rejections = 0;
  /// Gate-passing samples whose DLT system was rank deficient.
  std::uint64_t degenerate_fits = 0;
  /// Every hypothesis whose transformed image corners were not convex.
  std::uint64_t posthoc_rejections = 0;
  /// The subset of posthoc_rejections that had reached exit_inliers.
  std::uint64_t exit_posthoc_rejections = 0;
  std::optional<std::uint64_t> winning_draw;
  bool refit_applied = false;
};

/// Reported to an observer, in draw order, for every gate-passing sample.
struct HypothesisEvent {
  std::uint64_t draw_index = 0;
  const Sample* sample = nullptr;
  bool fit_ok = false;
  bool plausible = false;
  std::size_t inliers = 0;
};

using HypothesisObserver = std::function<void(const HypothesisEvent&)>;

/// Expected iterations at p_r for the run's class counts, assuming half of
/// each class corresponds, capped at kMaxIterationsCap.
std::uint64_t default_max_iterations(const PointSet& a, const PointSet& b, double p_r = 0.95);

/// Image corners of `extent` mapped through `h` form a convex quadrilateral.
bool posthoc_plausibility(const Homography& h, Extent extent) noexcept;

/// Robust homography (B onto A) between two unpaired point sets.
///
/// Every draw gets its own random stream derived from (seed, draw index), and
/// results are reduced in draw order, so the outcome does not depend on
/// `threads`. Samples failing the Q gate are redrawn without consuming the
/// hypothesis budget. The first plausible hypothesis reaching exit_inliers
/// wins; otherwise the plausible hypothesis with most inliers (then lowest
/// mean inlier distance, then earliest draw) is returned as best effort.
RansacResult run(const PointSet& a, const PointSet& b, const RansacConfig& cfg,
                 const HypothesisObserver& observer = {});

}  // namespace hransac
