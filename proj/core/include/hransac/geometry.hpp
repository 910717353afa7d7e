#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

#include <Eigen/Core>

namespace hransac {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

inline bool is_finite(Point2 p) noexcept {
  return std::isfinite(p.x) && std::isfinite(p.y);
}

double distance(Point2 a, Point2 b) noexcept;

/// Image size in pixels.
struct Extent {
  double width = 0.0;
  double height = 0.0;

  friend bool operator==(const Extent&, const Extent&) = default;
};

/// The four image corners, clockwise in y-down image coordinates.
std::array<Point2, 4> corners(Extent extent) noexcept;

/// Ordered set of four vertices; edges join consecutive vertices cyclically.
using Quadrilateral = std::array<Point2, 4>;

enum class QuadClass {
  Convex,                   // Q = 4
  ConcaveSimple,            // Q = 2
  ConcaveSelfIntersecting,  // Q = 0
  Degenerate,               // some turn sign is zero
};

std::optional<int> q_value(QuadClass c) noexcept;
std::string_view to_string(QuadClass c) noexcept;

/// Sign of the z component of (p_i - p_prev) x (p_next - p_i) at each vertex.
std::array<int, 4> turn_signs(const Quadrilateral& quad) noexcept;

/// Q = |sum of turn signs|. Any zero turn makes the quadrilateral Degenerate.
QuadClass classify_quad(const Quadrilateral& quad) noexcept;

/// How a Homography was scaled when stored.
enum class Normalization {
  UnitH33,    // h33 == 1
  Frobenius,  // |H|_F == 1, first nonzero entry positive (h33 ~ 0)
};

std::string_view to_string(Normalization n) noexcept;

/// Nonsingular 3x3 projective map, stored in a canonical scale so that two
/// homographies describing the same map compare equal entrywise.
class Homography {
 public:
  /// Identity.
  Homography();

  /// Normalizes `m`. Throws DegenerateConfiguration if `m` is singular or
  /// has non-finite entries.
  explicit Homography(const Eigen::Matrix3d& m);

  static Homography from_row_major(std::span<const double, 9> values);
  static Homography translation(double tx, double ty);

  const Eigen::Matrix3d& matrix() const noexcept { return m_; }
  double operator()(int row, int col) const noexcept { return m_(row, col); }
  Normalization normalization() const noexcept { return normalization_; }
  std::array<double, 9> row_major() const noexcept;

  Homography inverse() const;

 private:
  Eigen::Matrix3d m_;
  Normalization normalization_ = Normalization::UnitH33;
};

/// Least-squares DLT fit of dst[i] ~ H * src[i] on isotropically
/// conditioned coordinates. Requires at least four positional pairs.
///
/// The system is rejected as rank deficient (DegenerateConfiguration) unless
/// the second smallest singular value exceeds kDltRankTolerance times the
/// largest, and the conditioned solution is nonsingular.
Homography estimate_homography(std::span<const Point2> src, std::span<const Point2> dst);

/// Non-throwing variant used on hot paths; nullopt on any degeneracy.
std::optional<Homography> try_estimate_homography(std::span<const Point2> src,
                                                  std::span<const Point2> dst) noexcept;

inline constexpr double kDltRankTolerance = 1e-8;
inline constexpr double kInfinityTolerance = 1e-12;

/// (u/w, v/w) for (u, v, w) = H (x, y, 1). Throws PointAtInfinity when
/// |w| < kInfinityTolerance * |H|_F.
Point2 apply(const Homography& h, Point2 p);

/// Same as apply but returns nullopt instead of throwing.
std::optional<Point2> try_apply(const Homography& h, Point2 p) noexcept;

/// Homogeneous w component of H (x, y, 1).
double homogeneous_w(const Homography& h, Point2 p) noexcept;

struct CornerDisplacement {
  double max_abs_dx = 0.0;
  double max_abs_dy = 0.0;
};

/// Largest |x' - x| and |y' - y| over the four image corners.
CornerDisplacement corner_displacements(const Homography& h, Extent extent);

}  // namespace hransac
