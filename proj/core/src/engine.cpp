#include "hransac/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hransac/analysis.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hransac {

namespace {

struct DrawOutcome {
  bool gate = false;
  bool fit = false;
  bool plausible = false;
  Sample sample;
  std::optional<Homography> h;
  std::size_t inliers = 0;
  double mean_distance = 0.0;
};

struct Context {
  const PointSet& a;
  const PointSet& b;
  Eligibility eligibility;
  MatchThreshold threshold;
  Extent extent;
  const RansacConfig& cfg;
};

DrawOutcome evaluate_draw(const Context& ctx, Matcher& matcher, std::uint64_t draw) {
  DrawOutcome o;
  Rng rng = make_stream(ctx.cfg.seed, draw);
  const auto alloc = roulette_allocation(ctx.eligibility.n1, ctx.eligibility.n2, rng, ctx.cfg.allocation_rule);
  o.sample = draw_sample(ctx.a, ctx.b, alloc, rng);

  const Quadrilateral qa = quad_of(ctx.a, o.sample.a);
  const Quadrilateral qb = quad_of(ctx.b, o.sample.b);
  o.gate = q_gate(qa, qb);
  if (!o.gate) return o;

  o.h = try_estimate_homography(qb, qa);
  o.fit = o.h.has_value();
  if (!o.fit) return o;

  const auto pairs = matcher.match(*o.h);
  o.inliers = pairs.size();
  if (!pairs.empty()) {
    double sum = 0.0;
    for (const auto& p : pairs) sum += p.distance;
    o.mean_distance = sum / static_cast<double>(pairs.size());
  }
  o.plausible = posthoc_plausibility(*o.h, ctx.extent);
  return o;
}

bool better(const DrawOutcome& o, const DrawOutcome* best) {
  if (!best) return true;
  if (o.inliers != best->inliers) return o.inliers > best->inliers;
  return o.mean_distance < best->mean_distance;
}

std::uint64_t saturating_mul(std::uint64_t x, std::uint64_t y) {
  if (x != 0 && y > std::numeric_limits<std::uint64_t>::max() / x) return std::numeric_limits<std::uint64_t>::max();
  return x * y;
}

void validate(const RansacConfig& cfg) {
  if (!(cfg.lambda > 0.0)) throw std::invalid_argument("RansacConfig: lambda must be positive");
  if (cfg.max_iterations && *cfg.max_iterations < 1) {
    throw std::invalid_argument("RansacConfig: max_iterations must be at least 1");
  }
  if (cfg.exit_inliers < 4) throw std::invalid_argument("RansacConfig: exit_inliers must be at least 4");
  if (cfg.image_b_extent && (!(cfg.image_b_extent->width > 0.0) || !(cfg.image_b_extent->height > 0.0))) {
    throw std::invalid_argument("RansacConfig: image extent must be positive");
  }
}

}  // namespace

std::string_view to_string(RunStatus s) noexcept {
  switch (s) {
    case RunStatus::EarlyExit: return "early_exit";
    case RunStatus::BestEffortAtExhaustion: return "best_effort_at_exhaustion";
    case RunStatus::NoModelFound: return "no_model_found";
    case RunStatus::Ineligible: return "ineligible";
  }
  return "unknown";
}

std::uint64_t default_max_iterations(const PointSet& a, const PointSet& b, double p_r) {
  const auto elig = eligibility(a, b);
  if (!elig.eligible) return 1;
  const double share = static_cast<double>(elig.n1) / static_cast<double>(elig.n1 + elig.n2);
  IterationQuery q;
  q.n1_a = a.n_class1();
  q.n2_a = a.n_class2();
  q.n1_b = b.n_class1();
  q.n2_b = b.n_class2();
  q.k1 = elig.n1 / 2;
  q.k2 = elig.n2 / 2;
  q.e1 = static_cast<std::size_t>(std::lround(4.0 * share));
  q.p_r = p_r;
  const auto n = expected_iterations(q);
  if (!n) return kMaxIterationsCap;
  return std::clamp<std::uint64_t>(*n, 1, kMaxIterationsCap);
}

bool posthoc_plausibility(const Homography& h, Extent extent) noexcept {
  if (!(extent.width > 0.0) || !(extent.height > 0.0)) return false;
  Quadrilateral moved;
  const auto src = corners(extent);
  for (std::size_t i = 0; i < 4; ++i) {
    const auto p = try_apply(h, src[i]);
    if (!p) return false;
    moved[i] = *p;
  }
  return classify_quad(moved) == QuadClass::Convex;
}

RansacResult run(const PointSet& a, const PointSet& b, const RansacConfig& cfg, const HypothesisObserver& observer) {
  validate(cfg);
  RansacResult r;
  r.eligibility = eligibility(a, b);
  if (!r.eligibility.eligible) {
    r.status = RunStatus::Ineligible;
    return r;
  }
  r.threshold = adaptive_threshold(b, cfg.lambda);
  r.extent = cfg.image_b_extent.value_or(b.extent().value_or(b.bounding_extent()));
  r.budget = cfg.max_iterations.value_or(default_max_iterations(a, b));
  const std::uint64_t max_draws = cfg.max_draws ? cfg.max_draws : saturating_mul(r.budget, kDrawsPerHypothesis);

  const Context ctx{a, b, r.eligibility, r.threshold, r.extent, cfg};
  const int threads = std::max(1, cfg.threads);
  const std::uint64_t chunk = threads == 1 ? 64 : 256 * static_cast<std::uint64_t>(threads);

  std::vector<Matcher> matchers;
  matchers.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) matchers.emplace_back(a, b, r.threshold, cfg.matching_rule);

  std::vector<DrawOutcome> outcomes;
  std::optional<DrawOutcome> best;
  std::optional<DrawOutcome> winner;
  bool done = false;

  for (std::uint64_t start = 0; !done && start < max_draws; start += chunk) {
    const std::uint64_t count = std::min(chunk, max_draws - start);
    outcomes.assign(count, DrawOutcome{});
    const auto n = static_cast<std::int64_t>(count);
    if (threads == 1) {
      for (std::int64_t i = 0; i < n; ++i) {
        outcomes[static_cast<std::size_t>(i)] = evaluate_draw(ctx, matchers[0], start + static_cast<std::uint64_t>(i));
      }
    } else {
#pragma omp parallel for num_threads(threads) schedule(static)
      for (std::int64_t i = 0; i < n; ++i) {
        int tid = 0;
#ifdef _OPENMP
        tid = omp_get_thread_num();
#endif
        outcomes[static_cast<std::size_t>(i)] =
            evaluate_draw(ctx, matchers[static_cast<std::size_t>(tid)], start + static_cast<std::uint64_t>(i));
      }
    }

    // Sequential reduction in draw order reproduces the single-threaded run.
    for (std::uint64_t i = 0; i < count; ++i) {
      DrawOutcome& o = outcomes[i];
      const std::uint64_t draw = start + i;
      ++r.iterations_used;
      if (!o.gate) {
        ++r.q_gate_rejections;
        continue;
      }
      ++r.hypotheses_evaluated;
      if (observer) observer(HypothesisEvent{draw, &o.sample, o.fit, o.plausible, o.inliers});

      if (!o.fit) {
        ++r.degenerate_fits;
      } else if (!o.plausible) {
        ++r.posthoc_rejections;
        if (o.inliers >= cfg.exit_inliers) ++r.exit_posthoc_rejections;
      } else if (o.inliers >= cfg.exit_inliers) {
        r.winning_draw = draw;
        winner = std::move(o);
        done = true;
        break;
      } else if (better(o, best ? &*best : nullptr)) {
        r.winning_draw = draw;
        best = std::move(o);
      }
      if (r.hypotheses_evaluated >= r.budget) {
        done = true;
        break;
      }
    }
  }

  const DrawOutcome* chosen = nullptr;
  if (winner) {
    r.status = RunStatus::EarlyExit;
    chosen = &*winner;
  } else if (best && best->inliers >= 4) {
    r.status = RunStatus::BestEffortAtExhaustion;
    chosen = &*best;
  } else {
    r.status = RunStatus::NoModelFound;
    r.winning_draw.reset();
    return r;
  }

  Matcher& matcher = matchers[0];
  Homography h = *chosen->h;
  auto pairs = matcher.match(h);
  std::vector<InlierPair> inliers(pairs.begin(), pairs.end());

  if (cfg.refit_on_inliers && inliers.size() > 4) {
    std::vector<Point2> src, dst;
    src.reserve(inliers.size());
    dst.reserve(inliers.size());
    for (const auto& p : inliers) {
      src.push_back(b.position(p.index_b));
      dst.push_back(a.position(p.index_a));
    }
    if (auto refit = try_estimate_homography(src, dst); refit && posthoc_plausibility(*refit, r.extent)) {
      const auto refit_pairs = matcher.match(*refit);
      if (refit_pairs.size() >= inliers.size()) {
        h = *refit;
        inliers.assign(refit_pairs.begin(), refit_pairs.end());
        r.refit_applied = true;
      }
    }
  }

  r.homography = h;
  r.inliers = std::move(inliers);
  return r;
}

}  // namespace hransac
