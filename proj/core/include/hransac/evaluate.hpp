#pragma once

#include <cstddef>
#include <span>
#include <string_view>

#include "hransac/engine.hpp"
#include "hransac/scene.hpp"

namespace hransac {

enum class Verdict { CorrectlyAligned, WronglyAligned };

/// Mean reprojection error bands: [0, 5), [5, 10), >= 10 pixels.
enum class ErrorBin { Under5, FiveToTen, Over10 };

std::string_view to_string(Verdict v) noexcept;
std::string_view to_string(ErrorBin b) noexcept;
ErrorBin error_bin_for(double mean_error) noexcept;

struct EvalReport {
  std::size_t correct_pairs = 0;
  std::size_t wrong_pairs = 0;
  std::size_t missed_pairs = 0;
  Verdict verdict = Verdict::WronglyAligned;
  double mean_reprojection_error = 0.0;  // over truth pairs, pixels
  ErrorBin error_bin = ErrorBin::Over10;
};

/// Scores a run against ground truth.
///
/// A truth pair is correct when it is among the returned inliers and its B
/// point, mapped through the estimated homography, lands within t of its A
/// partner. Returned inliers that are not truth pairs are wrong. Every truth
/// pair that is not correct is missed. The frame pair is correctly aligned
/// when at least four pairs are correct and none is wrong.
///
/// Throws NoModel when the result carries no homography, and
/// std::out_of_range for truth indices outside the sets.
EvalReport evaluate(const RansacResult& result, const PointSet& a, const PointSet& b,
                    std::span<const TruthPair> truth, const MatchThreshold& t);

inline EvalReport evaluate(const RansacResult& result, const SyntheticScene& scene, const MatchThreshold& t) {
  return evaluate(result, scene.set_a, scene.set_b, scene.truth_pairs, t);
}

}  // namespace hransac
