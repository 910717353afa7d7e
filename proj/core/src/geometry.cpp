#include "hransac/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "hransac/errors.hpp"

namespace hransac {

namespace {

int sign(double v) noexcept { return (v > 0.0) - (v < 0.0); }

// Maps a point set to zero centroid and RMS distance sqrt(2).
std::optional<Eigen::Matrix3d> conditioning(std::span<const Point2> pts) noexcept {
  const double n = static_cast<double>(pts.size());
  double cx = 0.0, cy = 0.0;
  for (const auto& p : pts) {
    cx += p.x;
    cy += p.y;
  }
  cx /= n;
  cy /= n;
  double ss = 0.0;
  for (const auto& p : pts) ss += (p.x - cx) * (p.x - cx) + (p.y - cy) * (p.y - cy);
  const double rms = std::sqrt(ss / n);
  if (!(rms > 0.0) || !std::isfinite(rms)) return std::nullopt;
  const double s = std::sqrt(2.0) / rms;
  Eigen::Matrix3d t;
  t << s, 0.0, -s * cx,
       0.0, s, -s * cy,
       0.0, 0.0, 1.0;
  return t;
}

enum class DltFailure { None, NonFinite, Spread, RankDeficient, Singular };

struct DltOutcome {
  std::optional<Homography> h;
  DltFailure failure = DltFailure::None;
};

DltOutcome solve_dlt(std::span<const Point2> src, std::span<const Point2> dst) noexcept {
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (!is_finite(src[i]) || !is_finite(dst[i])) return {std::nullopt, DltFailure::NonFinite};
  }
  const auto ts = conditioning(src);
  const auto td = conditioning(dst);
  if (!ts || !td) return {std::nullopt, DltFailure::Spread};

  // Zero rows pad the system to at least 9 equations so the SVD exposes all
  // nine singular values, including the null direction of a minimal sample.
  const Eigen::Index rows = std::max<Eigen::Index>(9, 2 * static_cast<Eigen::Index>(src.size()));
  Eigen::Matrix<double, Eigen::Dynamic, 9> a = Eigen::Matrix<double, Eigen::Dynamic, 9>::Zero(rows, 9);
  for (std::size_t i = 0; i < src.size(); ++i) {
    const Eigen::Vector3d s = *ts * Eigen::Vector3d(src[i].x, src[i].y, 1.0);
    const Eigen::Vector3d d = *td * Eigen::Vector3d(dst[i].x, dst[i].y, 1.0);
    const double x = s.x(), y = s.y(), u = d.x(), v = d.y();
    const auto r = static_cast<Eigen::Index>(2 * i);
    a.row(r) << -x, -y, -1.0, 0.0, 0.0, 0.0, u * x, u * y, u;
    a.row(r + 1) << 0.0, 0.0, 0.0, -x, -y, -1.0, v * x, v * y, v;
  }

  Eigen::JacobiSVD<Eigen::Matrix<double, Eigen::Dynamic, 9>> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (!(sv(7) > kDltRankTolerance * sv(0))) return {std::nullopt, DltFailure::RankDeficient};

  const Eigen::Matrix<double, 9, 1> h = svd.matrixV().col(8);
  Eigen::Matrix3d hn;
  hn << h(0), h(1), h(2),
        h(3), h(4), h(5),
        h(6), h(7), h(8);
  // Unit Frobenius norm, so |det| is scale free; a singular map means the
  // destination (or source) quadrilateral collapsed.
  if (!(std::abs(hn.determinant()) > kDltRankTolerance)) return {std::nullopt, DltFailure::Singular};

  const Eigen::Matrix3d m = td->inverse() * hn * *ts;
  try {
    return {Homography(m), DltFailure::None};
  } catch (const Error&) {
    return {std::nullopt, DltFailure::Singular};
  }
}

void check_pairs(std::span<const Point2> src, std::span<const Point2> dst) {
  if (src.size() != dst.size()) {
    throw std::invalid_argument("estimate_homography: source and destination sizes differ");
  }
  if (src.size() < 4) {
    throw InsufficientPoints("estimate_homography: at least 4 point pairs are required, got " +
                             std::to_string(src.size()));
  }
}

}  // namespace

double distance(Point2 a, Point2 b) noexcept { return std::hypot(a.x - b.x, a.y - b.y); }

std::array<Point2, 4> corners(Extent e) noexcept {
  return {Point2{0.0, 0.0}, Point2{e.width, 0.0}, Point2{e.width, e.height}, Point2{0.0, e.height}};
}

std::optional<int> q_value(QuadClass c) noexcept {
  switch (c) {
    case QuadClass::Convex: return 4;
    case QuadClass::ConcaveSimple: return 2;
    case QuadClass::ConcaveSelfIntersecting: return 0;
    case QuadClass::Degenerate: break;
  }
  return std::nullopt;
}

std::string_view to_string(QuadClass c) noexcept {
  switch (c) {
    case QuadClass::Convex: return "convex";
    case QuadClass::ConcaveSimple: return "concave_simple";
    case QuadClass::ConcaveSelfIntersecting: return "concave_self_intersecting";
    case QuadClass::Degenerate: return "degenerate";
  }
  return "unknown";
}

std::array<int, 4> turn_signs(const Quadrilateral& q) noexcept {
  std::array<int, 4> out{};
  for (std::size_t i = 0; i < 4; ++i) {
    const Point2& prev = q[(i + 3) % 4];
    const Point2& cur = q[i];
    const Point2& next = q[(i + 1) % 4];
    const double ex = cur.x - prev.x, ey = cur.y - prev.y;
    const double fx = next.x - cur.x, fy = next.y - cur.y;
    out[i] = sign(ex * fy - ey * fx);
  }
  return out;
}

QuadClass classify_quad(const Quadrilateral& q) noexcept {
  const auto s = turn_signs(q);
  if (std::find(s.begin(), s.end(), 0) != s.end()) return QuadClass::Degenerate;
  switch (std::abs(s[0] + s[1] + s[2] + s[3])) {
    case 4: return QuadClass::Convex;
    case 2: return QuadClass::ConcaveSimple;
    default: return QuadClass::ConcaveSelfIntersecting;
  }
}

std::string_view to_string(Normalization n) noexcept {
  return n == Normalization::UnitH33 ? "h33" : "frobenius";
}

Homography::Homography() : m_(Eigen::Matrix3d::Identity()) {}

Homography::Homography(const Eigen::Matrix3d& m) {
  if (!m.allFinite()) throw DegenerateConfiguration("homography has non-finite entries");
  const double norm = m.norm();
  if (!(norm > 0.0)) throw DegenerateConfiguration("homography is the zero matrix");
  Eigen::Matrix3d f = m / norm;
  // Hadamard ratio |det| / prod(row norms) is scale free and lies in [0, 1].
  const double rows = f.row(0).norm() * f.row(1).norm() * f.row(2).norm();
  if (!(std::abs(f.determinant()) > 1e-13 * rows)) throw DegenerateConfiguration("homography is singular");

  if (std::abs(f(2, 2)) > 1e-6) {
    m_ = f / f(2, 2);
    m_(2, 2) = 1.0;
    normalization_ = Normalization::UnitH33;
    return;
  }
  for (int i = 0; i < 9; ++i) {
    const double v = f(i / 3, i % 3);
    if (std::abs(v) > 1e-12) {
      if (v < 0.0) f = -f;
      break;
    }
  }
  m_ = f;
  normalization_ = Normalization::Frobenius;
}

Homography Homography::from_row_major(std::span<const double, 9> v) {
  Eigen::Matrix3d m;
  m << v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8];
  return Homography(m);
}

Homography Homography::translation(double tx, double ty) {
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
  m(0, 2) = tx;
  m(1, 2) = ty;
  return Homography(m);
}

std::array<double, 9> Homography::row_major() const noexcept {
  std::array<double, 9> out{};
  for (int i = 0; i < 9; ++i) out[static_cast<std::size_t>(i)] = m_(i / 3, i % 3);
  return out;
}

Homography Homography::inverse() const { return Homography(m_.inverse()); }

Homography estimate_homography(std::span<const Point2> src, std::span<const Point2> dst) {
  check_pairs(src, dst);
  auto out = solve_dlt(src, dst);
  switch (out.failure) {
    case DltFailure::None: return *out.h;
    case DltFailure::NonFinite: throw std::invalid_argument("estimate_homography: non-finite coordinates");
    case DltFailure::Spread: throw DegenerateConfiguration("estimate_homography: all points coincide");
    case DltFailure::RankDeficient:
      throw DegenerateConfiguration("estimate_homography: DLT system is rank deficient");
    case DltFailure::Singular:
      throw DegenerateConfiguration("estimate_homography: solution is singular");
  }
  throw DegenerateConfiguration("estimate_homography: unknown failure");
}

std::optional<Homography> try_estimate_homography(std::span<const Point2> src,
                                                  std::span<const Point2> dst) noexcept {
  if (src.size() != dst.size() || src.size() < 4) return std::nullopt;
  return solve_dlt(src, dst).h;
}

double homogeneous_w(const Homography& h, Point2 p) noexcept {
  const auto& m = h.matrix();
  return m(2, 0) * p.x + m(2, 1) * p.y + m(2, 2);
}

std::optional<Point2> try_apply(const Homography& h, Point2 p) noexcept {
  const auto& m = h.matrix();
  const double w = m(2, 0) * p.x + m(2, 1) * p.y + m(2, 2);
  if (!(std::abs(w) >= kInfinityTolerance * m.norm())) return std::nullopt;
  const double u = m(0, 0) * p.x + m(0, 1) * p.y + m(0, 2);
  const double v = m(1, 0) * p.x + m(1, 1) * p.y + m(1, 2);
  return Point2{u / w, v / w};
}

Point2 apply(const Homography& h, Point2 p) {
  if (auto q = try_apply(h, p)) return *q;
  throw PointAtInfinity("apply: point maps to the line at infinity");
}

CornerDisplacement corner_displacements(const Homography& h, Extent extent) {
  if (!(extent.width > 0.0) || !(extent.height > 0.0)) {
    throw std::invalid_argument("corner_displacements: extent must be positive");
  }
  CornerDisplacement out;
  for (const Point2& c : corners(extent)) {
    const Point2 t = apply(h, c);
    out.max_abs_dx = std::max(out.max_abs_dx, std::abs(t.x - c.x));
    out.max_abs_dy = std::max(out.max_abs_dy, std::abs(t.y - c.y));
  }
  return out;
}

}  // namespace hransac
