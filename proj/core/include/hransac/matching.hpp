#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "hransac/geometry.hpp"
#include "hransac/sampling.hpp"

namespace hransac {

inline constexpr double kDefaultLambda = 0.01;

struct InlierPair {
  std::size_t index_a = 0;
  std::size_t index_b = 0;
  ClassLabel label = ClassLabel::Unlabeled;
  double distance = 0.0;  // |A_i - H B_j| in pixels

  friend bool operator==(const InlierPair&, const InlierPair&) = default;
};

struct MatchThreshold {
  double lambda = kDefaultLambda;
  double t = 0.0;  // pixels
};

/// t = lambda * largest pairwise distance among the untransformed points of
/// B, classes pooled. Throws InsufficientPoints below two points.
MatchThreshold adaptive_threshold(const PointSet& b, double lambda = kDefaultLambda);

enum class MatchingRule {
  /// Global greedy selection in ascending (distance, index_a, index_b)
  /// order; every index appears at most once.
  OneToOne,
  /// Nearest same-class transformed B point for every A point; a B point
  /// may serve several A points.
  NearestPerA,
};

std::string_view to_string(MatchingRule rule) noexcept;

/// Pairs A points with H-transformed B points of the same class at distance
/// below t. B points that H sends to infinity stay unmatched. Output is
/// sorted by index_a.
std::vector<InlierPair> inlier_pairs(const PointSet& a, const PointSet& b, const Homography& h,
                                     const MatchThreshold& t, MatchingRule rule = MatchingRule::OneToOne);

/// Reusable buffers for repeated matching against the same sets.
class Matcher {
 public:
  Matcher(const PointSet& a, const PointSet& b, MatchThreshold t, MatchingRule rule);

  /// Inliers of `h`; the returned span is valid until the next call.
  std::span<const InlierPair> match(const Homography& h);

 private:
  struct Candidate {
    double d;
    std::size_t i;
    std::size_t j;
  };

  const PointSet* a_;
  const PointSet* b_;
  MatchThreshold t_;
  MatchingRule rule_;
  std::vector<Point2> moved_;
  std::vector<unsigned char> finite_;
  std::vector<Candidate> candidates_;
  std::vector<unsigned char> used_a_;
  std::vector<unsigned char> used_b_;
  std::vector<InlierPair> out_;
};

}  // namespace hransac
