#include "hransac/evaluate.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <stdexcept>
#include <utility>

#include "hransac/errors.hpp"

namespace hransac {

std::string_view to_string(Verdict v) noexcept {
  return v == Verdict::CorrectlyAligned ? "correctly_aligned" : "wrongly_aligned";
}

std::string_view to_string(ErrorBin b) noexcept {
  switch (b) {
    case ErrorBin::Under5: return "under_5";
    case ErrorBin::FiveToTen: return "5_to_10";
    case ErrorBin::Over10: break;
  }
  return "over_10";
}

ErrorBin error_bin_for(double e) noexcept {
  if (e < 5.0) return ErrorBin::Under5;
  if (e < 10.0) return ErrorBin::FiveToTen;
  return ErrorBin::Over10;
}

EvalReport evaluate(const RansacResult& result, const PointSet& a, const PointSet& b,
                    std::span<const TruthPair> truth, const MatchThreshold& t) {
  if (!result.homography) throw NoModel("evaluate: result has no homography");
  const Homography& h = *result.homography;

  std::set<std::pair<std::size_t, std::size_t>> truth_set;
  for (const auto& p : truth) {
    if (p.index_a >= a.size() || p.index_b >= b.size()) {
      throw std::out_of_range("evaluate: truth pair index outside the point sets");
    }
    if (!truth_set.emplace(p.index_a, p.index_b).second) {
      throw std::invalid_argument("evaluate: duplicate truth pair");
    }
  }
  std::set<std::pair<std::size_t, std::size_t>> inlier_set;
  for (const auto& p : result.inliers) inlier_set.emplace(p.index_a, p.index_b);

  EvalReport r;
  double sum = 0.0;
  std::size_t finite = 0;
  for (const auto& [ia, ib] : truth_set) {
    const auto moved = try_apply(h, b.position(ib));
    if (!moved) continue;
    const double err = distance(a.position(ia), *moved);
    sum += err;
    ++finite;
    if (err < t.t && inlier_set.contains({ia, ib})) ++r.correct_pairs;
  }
  for (const auto& pair : inlier_set) {
    if (!truth_set.contains(pair)) ++r.wrong_pairs;
  }
  r.missed_pairs = truth_set.size() - r.correct_pairs;
  r.verdict = (r.correct_pairs >= 4 && r.wrong_pairs == 0) ? Verdict::CorrectlyAligned : Verdict::WronglyAligned;
  r.mean_reprojection_error = finite ? sum / static_cast<double>(finite) : std::numeric_limits<double>::infinity();
  r.error_bin = error_bin_for(r.mean_reprojection_error);
  return r;
}

}  // namespace hransac
