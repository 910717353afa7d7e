#include "hransac/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hransac {

namespace {

// Writes `count` distinct entries of `pool` in uniformly random order to out.
void choose_ordered(std::span<const std::size_t> pool, std::size_t count, Rng& rng, std::size_t* out) {
  std::array<std::size_t, 64> scratch{};
  std::vector<std::size_t> heap;
  std::size_t* buf = scratch.data();
  if (pool.size() > scratch.size()) {
    heap.assign(pool.begin(), pool.end());
    buf = heap.data();
  } else {
    std::copy(pool.begin(), pool.end(), buf);
  }
  // Partial Fisher-Yates over the first `count` slots.
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(buf[i], buf[pick(rng)]);
    out[i] = buf[i];
  }
}

}  // namespace

std::string_view to_string(ClassLabel label) noexcept {
  switch (label) {
    case ClassLabel::Class1: return "class1";
    case ClassLabel::Class2: return "class2";
    case ClassLabel::Unlabeled: break;
  }
  return "unlabeled";
}

PointSet::PointSet(std::vector<LabeledPoint> points, std::optional<Extent> extent, std::string image_id)
    : points_(std::move(points)), extent_(extent), image_id_(std::move(image_id)) {
  std::size_t unlabeled = 0;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto& p = points_[i];
    if (!is_finite(p.position)) throw std::invalid_argument("point set: non-finite coordinate");
    if (p.label == ClassLabel::Unlabeled) ++unlabeled;
  }
  if (unlabeled != 0 && unlabeled != points_.size()) {
    throw std::invalid_argument("point set: labeled and unlabeled points are mixed");
  }
  labeled_ = !points_.empty() && unlabeled == 0;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    slots_[points_[i].label == ClassLabel::Class2 ? 1 : 0].push_back(i);
  }
  if (extent_ && (!(extent_->width > 0.0) || !(extent_->height > 0.0))) {
    throw std::invalid_argument("point set: extent must be positive");
  }
}

PointSet PointSet::unlabeled(std::span<const Point2> points, std::optional<Extent> extent) {
  std::vector<LabeledPoint> pts;
  pts.reserve(points.size());
  for (const auto& p : points) pts.push_back({p, ClassLabel::Unlabeled});
  return PointSet(std::move(pts), extent);
}

Extent PointSet::bounding_extent() const noexcept {
  Extent e{1.0, 1.0};
  for (const auto& p : points_) {
    e.width = std::max(e.width, p.position.x);
    e.height = std::max(e.height, p.position.y);
  }
  return e;
}

Eligibility eligibility(const PointSet& a, const PointSet& b) noexcept {
  Eligibility out;
  const bool a_labeled = a.labeled(), b_labeled = b.labeled();
  if (!a.empty() && !b.empty() && a_labeled != b_labeled) return out;
  out.n1 = std::min(a.n_class1(), b.n_class1());
  out.n2 = std::min(a.n_class2(), b.n_class2());
  out.eligible = out.n1 + out.n2 >= 4;
  return out;
}

std::string_view to_string(AllocationRule rule) noexcept {
  return rule == AllocationRule::Proportional ? "proportional" : "per_slot";
}

SampleAllocation roulette_allocation(std::size_t n1, std::size_t n2, Rng& rng, AllocationRule rule) {
  if (n1 + n2 < 4) throw std::invalid_argument("roulette_allocation: n1 + n2 must be at least 4");
  const double share = static_cast<double>(n1) / static_cast<double>(n1 + n2);
  std::uniform_real_distribution<double> u01(0.0, 1.0);

  SampleAllocation out;
  if (rule == AllocationRule::Proportional) {
    // 4 * share <= n1 and 4 * (1 - share) <= n2, so both brackets are feasible.
    const double target = 4.0 * share;
    const double lo = std::floor(target);
    const double frac = target - lo;
    out.e1 = static_cast<std::size_t>(lo) + (frac > 0.0 && u01(rng) < frac ? 1 : 0);
    out.e2 = 4 - out.e1;
    return out;
  }

  while (out.e1 + out.e2 < 4) {
    const bool first = u01(rng) < share;
    if (first && out.e1 < n1) {
      ++out.e1;
    } else if (!first && out.e2 < n2) {
      ++out.e2;
    }
  }
  return out;
}

Sample draw_sample(const PointSet& a, const PointSet& b, SampleAllocation alloc, Rng& rng) {
  if (alloc.e1 + alloc.e2 != 4 || alloc.e1 > std::min(a.n_class1(), b.n_class1()) ||
      alloc.e2 > std::min(a.n_class2(), b.n_class2())) {
    throw std::invalid_argument("draw_sample: allocation is infeasible for these point sets");
  }
  Sample s;
  s.allocation = alloc;
  choose_ordered(a.slot(0), alloc.e1, rng, s.a.data());
  choose_ordered(a.slot(1), alloc.e2, rng, s.a.data() + alloc.e1);
  choose_ordered(b.slot(0), alloc.e1, rng, s.b.data());
  choose_ordered(b.slot(1), alloc.e2, rng, s.b.data() + alloc.e1);
  return s;
}

Quadrilateral quad_of(const PointSet& set, const std::array<std::size_t, 4>& idx) noexcept {
  return {set.position(idx[0]), set.position(idx[1]), set.position(idx[2]), set.position(idx[3])};
}

bool q_gate(const Quadrilateral& a, const Quadrilateral& b) noexcept {
  const QuadClass ca = classify_quad(a);
  if (ca == QuadClass::Degenerate) return false;
  return ca == classify_quad(b);
}

}  // namespace hransac
