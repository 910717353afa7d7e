#include "hransac/matching.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

#include "hransac/errors.hpp"

namespace hransac {

MatchThreshold adaptive_threshold(const PointSet& b, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("adaptive_threshold: lambda must be positive");
  if (b.size() < 2) {
    throw InsufficientPoints("adaptive_threshold: need at least 2 points, got " + std::to_string(b.size()));
  }
  double widest = 0.0;
  const auto pts = b.points();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      widest = std::max(widest, distance(pts[i].position, pts[j].position));
    }
  }
  return {lambda, lambda * widest};
}

std::string_view to_string(MatchingRule rule) noexcept {
  return rule == MatchingRule::OneToOne ? "one-to-one" : "nearest";
}

Matcher::Matcher(const PointSet& a, const PointSet& b, MatchThreshold t, MatchingRule rule)
    : a_(&a), b_(&b), t_(t), rule_(rule), moved_(b.size()), finite_(b.size()),
      used_a_(a.size()), used_b_(b.size()) {
  candidates_.reserve(a.size() * b.size());
  out_.reserve(std::min(a.size(), b.size()));
}

std::span<const InlierPair> Matcher::match(const Homography& h) {
  for (std::size_t j = 0; j < b_->size(); ++j) {
    const auto p = try_apply(h, b_->position(j));
    finite_[j] = p.has_value();
    if (p) moved_[j] = *p;
  }
  out_.clear();

  // Labels agree or the entry is treated as infinitely far.
  auto dist = [&](std::size_t i, std::size_t j) {
    if (!finite_[j] || (*a_)[i].label != (*b_)[j].label) return std::numeric_limits<double>::infinity();
    return distance(a_->position(i), moved_[j]);
  };

  if (rule_ == MatchingRule::NearestPerA) {
    for (std::size_t i = 0; i < a_->size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      std::size_t best_j = 0;
      for (std::size_t j = 0; j < b_->size(); ++j) {
        const double d = dist(i, j);
        if (d < best) {
          best = d;
          best_j = j;
        }
      }
      if (best < t_.t) out_.push_back({i, best_j, (*a_)[i].label, best});
    }
    return out_;
  }

  candidates_.clear();
  for (std::size_t i = 0; i < a_->size(); ++i) {
    for (std::size_t j = 0; j < b_->size(); ++j) {
      const double d = dist(i, j);
      if (d < t_.t) candidates_.push_back({d, i, j});
    }
  }
  std::sort(candidates_.begin(), candidates_.end(), [](const Candidate& l, const Candidate& r) {
    if (l.d != r.d) return l.d < r.d;
    if (l.i != r.i) return l.i < r.i;
    return l.j < r.j;
  });
  std::fill(used_a_.begin(), used_a_.end(), 0);
  std::fill(used_b_.begin(), used_b_.end(), 0);
  for (const auto& c : candidates_) {
    if (used_a_[c.i] || used_b_[c.j]) continue;
    used_a_[c.i] = used_b_[c.j] = 1;
    out_.push_back({c.i, c.j, (*a_)[c.i].label, c.d});
  }
  std::sort(out_.begin(), out_.end(),
            [](const InlierPair& l, const InlierPair& r) { return l.index_a < r.index_a; });
  return out_;
}

std::vector<InlierPair> inlier_pairs(const PointSet& a, const PointSet& b, const Homography& h,
                                     const MatchThreshold& t, MatchingRule rule) {
  Matcher m(a, b, t, rule);
  const auto pairs = m.match(h);
  return {pairs.begin(), pairs.end()};
}

}  // namespace hransac
