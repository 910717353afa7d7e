#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hransac/geometry.hpp"
#include "hransac/random.hpp"

namespace hransac {

enum class ClassLabel : unsigned char { Unlabeled, Class1, Class2 };

std::string_view to_string(ClassLabel label) noexcept;

struct LabeledPoint {
  Point2 position;
  ClassLabel label = ClassLabel::Unlabeled;

  friend bool operator==(const LabeledPoint&, const LabeledPoint&) = default;
};

/// Points detected in one image. Either every point carries a class label or
/// none does; an unlabeled set behaves as a single class (slot 0).
class PointSet {
 public:
  PointSet() = default;

  /// Throws std::invalid_argument on mixed labeling or non-finite positions.
  explicit PointSet(std::vector<LabeledPoint> points, std::optional<Extent> extent = std::nullopt,
                    std::string image_id = {});

  static PointSet unlabeled(std::span<const Point2> points, std::optional<Extent> extent = std::nullopt);

  bool labeled() const noexcept { return labeled_; }
  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }

  std::size_t n_class1() const noexcept { return slots_[0].size(); }
  std::size_t n_class2() const noexcept { return slots_[1].size(); }
  std::size_t total() const noexcept { return points_.size(); }

  std::span<const LabeledPoint> points() const noexcept { return points_; }
  const LabeledPoint& operator[](std::size_t i) const noexcept { return points_[i]; }
  Point2 position(std::size_t i) const noexcept { return points_[i].position; }

  /// Indices of Class1 points (slot 0) or Class2 points (slot 1). For an
  /// unlabeled set slot 0 holds every index and slot 1 is empty.
  std::span<const std::size_t> slot(int s) const noexcept { return slots_[static_cast<std::size_t>(s)]; }

  const std::optional<Extent>& extent() const noexcept { return extent_; }
  const std::string& image_id() const noexcept { return image_id_; }

  /// Axis-aligned box from the origin to the largest coordinates.
  Extent bounding_extent() const noexcept;

 private:
  std::vector<LabeledPoint> points_;
  std::array<std::vector<std::size_t>, 2> slots_;
  std::optional<Extent> extent_;
  std::string image_id_;
  bool labeled_ = false;
};

struct Eligibility {
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  bool eligible = false;
};

/// n_c = min over the two images of the class counts; eligible iff
/// n1 + n2 >= 4. Sets that disagree on being labeled are never eligible.
Eligibility eligibility(const PointSet& a, const PointSet& b) noexcept;

struct SampleAllocation {
  std::size_t e1 = 0;
  std::size_t e2 = 0;

  friend bool operator==(const SampleAllocation&, const SampleAllocation&) = default;
};

enum class AllocationRule {
  /// e1 is one of the two integers bracketing 4 n1 / (n1 + n2), picked so
  /// that E[e1] equals that ratio exactly.
  Proportional,
  /// Four independent slot draws with class weights n1 : n2; a draw that
  /// would exceed a class capacity is redrawn.
  PerSlot,
};

std::string_view to_string(AllocationRule rule) noexcept;

/// Biased roulette split of the four sample slots between the two classes.
/// Requires n1 + n2 >= 4.
SampleAllocation roulette_allocation(std::size_t n1, std::size_t n2, Rng& rng,
                                     AllocationRule rule = AllocationRule::Proportional);

/// Positional correspondence hypothesis: a[i] in set A pairs with b[i] in
/// set B. The first e1 entries are Class1, the remaining e2 are Class2.
struct Sample {
  std::array<std::size_t, 4> a{};
  std::array<std::size_t, 4> b{};
  SampleAllocation allocation;
};

/// Draws e1 distinct Class1 and e2 distinct Class2 points from each set, each
/// block a uniformly random ordered arrangement.
Sample draw_sample(const PointSet& a, const PointSet& b, SampleAllocation alloc, Rng& rng);

Quadrilateral quad_of(const PointSet& set, const std::array<std::size_t, 4>& indices) noexcept;

/// Pre-iteration gate: both quadrilaterals share a Q value and neither is
/// degenerate.
bool q_gate(const Quadrilateral& a, const Quadrilateral& b) noexcept;

}  // namespace hransac
