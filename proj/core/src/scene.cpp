#include "hransac/scene.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "hransac/engine.hpp"
#include "hransac/errors.hpp"

namespace hransac {

namespace {

constexpr int kMaxMapAttempts = 10000;
constexpr double kMinCornerSine = 0.2;

// Sine of the interior angle at every vertex stays above kMinCornerSine.
bool well_shaped(const Quadrilateral& q) {
  for (std::size_t i = 0; i < 4; ++i) {
    const Point2& p = q[(i + 3) % 4];
    const Point2& c = q[i];
    const Point2& n = q[(i + 1) % 4];
    const double ex = c.x - p.x, ey = c.y - p.y, fx = n.x - c.x, fy = n.y - c.y;
    const double cross = ex * fy - ey * fx;
    const double norms = std::hypot(ex, ey) * std::hypot(fx, fy);
    if (!(norms > 0.0) || std::abs(cross) / norms < kMinCornerSine) return false;
  }
  return true;
}

Homography sample_truth_map(const SceneParams& params, Rng& rng) {
  std::uniform_real_distribution<double> half(-0.5, 0.5);
  const double sx = params.max_displacement_x * params.extent.width;
  const double sy = params.max_displacement_y * params.extent.height;
  const auto src = corners(params.extent);
  for (int attempt = 0; attempt < kMaxMapAttempts; ++attempt) {
    const double shift_x = half(rng) * sx, shift_y = half(rng) * sy;
    Quadrilateral dst;
    for (std::size_t i = 0; i < 4; ++i) {
      dst[i] = {src[i].x + shift_x + half(rng) * sx, src[i].y + shift_y + half(rng) * sy};
    }
    if (!well_shaped(dst)) continue;
    const auto h = try_estimate_homography(src, dst);
    if (!h || !posthoc_plausibility(*h, params.extent)) continue;
    // The whole image must stay on one side of the vanishing line.
    bool same_side = true;
    const double w0 = homogeneous_w(*h, src[0]);
    for (const auto& c : src) same_side = same_side && homogeneous_w(*h, c) * w0 > 0.0;
    if (same_side) return *h;
  }
  throw InfeasibleParams("generate_scene: no plausible ground-truth map found");
}

class Placer {
 public:
  Placer(const SceneParams& params, Rng& rng) : params_(params), rng_(rng) {
    std::uniform_real_distribution<double> ux(0.1 * params.extent.width, 0.9 * params.extent.width);
    std::uniform_real_distribution<double> uy(0.1 * params.extent.height, 0.9 * params.extent.height);
    for (std::size_t c = 0; c < params.clusters; ++c) centers_.push_back({ux(rng), uy(rng)});
  }

  Point2 operator()() {
    const Extent& e = params_.extent;
    if (centers_.empty()) {
      std::uniform_real_distribution<double> ux(0.0, e.width), uy(0.0, e.height);
      return {ux(rng_), uy(rng_)};
    }
    std::uniform_int_distribution<std::size_t> pick(0, centers_.size() - 1);
    std::normal_distribution<double> g(0.0, params_.cluster_sigma);
    const Point2 c = centers_[pick(rng_)];
    return {std::clamp(c.x + g(rng_), 0.0, e.width), std::clamp(c.y + g(rng_), 0.0, e.height)};
  }

 private:
  const SceneParams& params_;
  Rng& rng_;
  std::vector<Point2> centers_;
};

// Isotropic Gaussian offset truncated at three standard deviations.
Point2 noise(double sigma, Rng& rng) {
  if (!(sigma > 0.0)) return {};
  std::normal_distribution<double> g(0.0, sigma);
  for (;;) {
    const Point2 d{g(rng), g(rng)};
    if (std::hypot(d.x, d.y) <= 3.0 * sigma) return d;
  }
}

struct Entry {
  LabeledPoint point;
  std::optional<std::size_t> truth_id;
};

}  // namespace

void validate(const SceneParams& p) {
  const std::size_t k = p.correspondences[0] + p.correspondences[1];
  if (k < 4) throw InfeasibleParams("scene: at least 4 correspondences are required");
  for (std::size_t c = 0; c < 2; ++c) {
    if (p.correspondences[c] > p.points_a[c] || p.correspondences[c] > p.points_b[c]) {
      throw InfeasibleParams("scene: a class plants more correspondences than it has points");
    }
  }
  if (!p.labeled && (p.points_a[1] != 0 || p.points_b[1] != 0 || p.correspondences[1] != 0)) {
    throw InfeasibleParams("scene: unlabeled scenes use a single class");
  }
  if (!(p.extent.width > 0.0) || !(p.extent.height > 0.0)) throw InfeasibleParams("scene: extent must be positive");
  if (!(p.noise_sigma >= 0.0)) throw InfeasibleParams("scene: noise must be non-negative");
  if (!(p.max_displacement_x >= 0.0) || !(p.max_displacement_y >= 0.0)) {
    throw InfeasibleParams("scene: displacement must be non-negative");
  }
  if (p.clusters > 0 && !(p.cluster_sigma > 0.0)) throw InfeasibleParams("scene: cluster sigma must be positive");
}

SyntheticScene generate_scene(const SceneParams& params, std::uint64_t seed) {
  validate(params);
  Rng rng = make_stream(seed, 0);
  SyntheticScene scene{sample_truth_map(params, rng), {}, {}, {}, params, seed};
  Placer place(params, rng);

  std::vector<Entry> a, b;
  std::size_t next_truth = 0;
  for (std::size_t c = 0; c < 2; ++c) {
    const ClassLabel label = !params.labeled ? ClassLabel::Unlabeled : (c == 0 ? ClassLabel::Class1 : ClassLabel::Class2);
    for (std::size_t i = 0; i < params.correspondences[c]; ++i) {
      const Point2 pb = place();
      const Point2 mapped = apply(scene.truth_h, pb);
      const Point2 d = noise(params.noise_sigma, rng);
      b.push_back({{pb, label}, next_truth});
      a.push_back({{{mapped.x + d.x, mapped.y + d.y}, label}, next_truth});
      ++next_truth;
    }
    for (std::size_t i = params.correspondences[c]; i < params.points_b[c]; ++i) {
      b.push_back({{place(), label}, std::nullopt});
    }
    // A-side outliers land where the B image projects, without a partner.
    for (std::size_t i = params.correspondences[c]; i < params.points_a[c]; ++i) {
      a.push_back({{apply(scene.truth_h, place()), label}, std::nullopt});
    }
  }
  std::shuffle(a.begin(), a.end(), rng);
  std::shuffle(b.begin(), b.end(), rng);

  std::vector<std::size_t> b_index_of(next_truth);
  std::vector<LabeledPoint> pts_a, pts_b;
  for (std::size_t j = 0; j < b.size(); ++j) {
    pts_b.push_back(b[j].point);
    if (b[j].truth_id) b_index_of[*b[j].truth_id] = j;
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    pts_a.push_back(a[i].point);
    if (a[i].truth_id) scene.truth_pairs.push_back({i, b_index_of[*a[i].truth_id]});
  }
  scene.set_a = PointSet(std::move(pts_a), std::nullopt, "scene-a");
  scene.set_b = PointSet(std::move(pts_b), params.extent, "scene-b");
  return scene;
}

IterationQuery scene_query(const SceneParams& p, double p_r, double gate_factor) {
  IterationQuery q;
  q.n1_a = p.points_a[0];
  q.n2_a = p.points_a[1];
  q.n1_b = p.points_b[0];
  q.n2_b = p.points_b[1];
  q.k1 = p.correspondences[0];
  q.k2 = p.correspondences[1];
  const std::size_t n1 = std::min(q.n1_a, q.n1_b), n2 = std::min(q.n2_a, q.n2_b);
  q.e1 = n1 + n2 == 0 ? 4 : static_cast<std::size_t>(std::lround(4.0 * static_cast<double>(n1) / static_cast<double>(n1 + n2)));
  q.p_r = p_r;
  q.gate_factor = gate_factor;
  return q;
}

bool is_planted_sample(const Sample& sample, std::span<const TruthPair> truth) noexcept {
  for (std::size_t i = 0; i < 4; ++i) {
    const TruthPair want{sample.a[i], sample.b[i]};
    if (std::find(truth.begin(), truth.end(), want) == truth.end()) return false;
  }
  return true;
}

}  // namespace hransac
