#include "hransac/batch.hpp"

#include <algorithm>
#include <stdexcept>

#include "hransac/io.hpp"
#include "hransac/random.hpp"

namespace hransac {

namespace {

struct Loaded {
  PointSet a;
  PointSet b;
  std::vector<TruthPair> truth;
  std::optional<std::uint64_t> budget;
};

Loaded load(const BatchItem& item, const BatchOptions& options) {
  if (const auto* scene_item = std::get_if<SceneItem>(&item.source)) {
    auto scene = generate_scene(scene_item->params, scene_item->seed);
    std::optional<std::uint64_t> budget;
    if (const auto n = scene_budget(scene_item->params, options); n > 0) budget = n;
    return {std::move(scene.set_a), std::move(scene.set_b), std::move(scene.truth_pairs), budget};
  }
  const auto& files = std::get<FileItem>(item.source);
  auto truth = read_truth(files.truth);
  return {read_point_set(files.set_a), read_point_set(files.set_b), std::move(truth.pairs), std::nullopt};
}

ItemReport run_item(const BatchItem& item, std::size_t index, const BatchOptions& options, int engine_threads) {
  ItemReport report;
  report.id = item.id;
  try {
    Loaded in = load(item, options);
    report.truth_pairs = in.truth.size();

    RansacConfig cfg = options.config;
    cfg.seed = derive_seed(options.config.seed, index);
    cfg.threads = engine_threads;
    if (!cfg.max_iterations && in.budget) cfg.max_iterations = in.budget;

    bool hit = false;
    const auto observer = [&](const HypothesisEvent& e) {
      if (!hit && is_planted_sample(*e.sample, in.truth)) hit = true;
    };
    report.result = run(in.a, in.b, cfg, observer);
    report.planted_hit = hit;
    if (report.result->homography) {
      report.eval = evaluate(*report.result, in.a, in.b, in.truth, report.result->threshold);
    }
  } catch (const std::exception& e) {
    report.error = e.what();
    report.result.reset();
    report.eval.reset();
  }
  return report;
}

}  // namespace

std::uint64_t scene_budget(const SceneParams& params, const BatchOptions& options) {
  if (options.config.max_iterations) return *options.config.max_iterations;
  if (options.scene_p_r) {
    const auto n = expected_iterations(scene_query(params, *options.scene_p_r));
    return n ? std::clamp<std::uint64_t>(*n, 1, kMaxIterationsCap) : kMaxIterationsCap;
  }
  return 0;
}

BatchReport batch_run(std::span<const BatchItem> items, const BatchOptions& options) {
  if (items.empty()) throw std::invalid_argument("batch_run: manifest is empty");
  BatchReport report;
  report.items.resize(items.size());
  const int workers = std::max(1, options.parallelism);
  const int engine_threads = workers > 1 ? 1 : std::max(1, options.config.threads);
  const auto n = static_cast<std::int64_t>(items.size());
#pragma omp parallel for num_threads(workers) schedule(dynamic, 1)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    report.items[idx] = run_item(items[idx], idx, options, engine_threads);
  }
  report.aggregate = aggregate(report.items);
  return report;
}

AggregateReport aggregate(std::span<const ItemReport> items) {
  AggregateReport g;
  g.items = items.size();
  for (const auto& it : items) {
    if (!it.error.empty()) {
      ++g.errors;
      continue;
    }
    if (it.planted_hit) ++g.planted_hits;
    if (!it.result) continue;
    const auto& r = *it.result;
    g.iterations_used += r.iterations_used;
    g.hypotheses_evaluated += r.hypotheses_evaluated;
    g.q_gate_rejections += r.q_gate_rejections;
    g.posthoc_rejections += r.posthoc_rejections;
    g.exit_posthoc_rejections += r.exit_posthoc_rejections;
    if (r.status == RunStatus::Ineligible) {
      ++g.ineligible;
      continue;
    }
    if (!r.homography || !it.eval) {
      ++g.no_model;
      continue;
    }
    const auto& e = *it.eval;
    ++g.processed;
    (e.wrong_pairs == 0 ? g.wrong_zero : g.wrong_at_least_one) += 1;
    if (e.missed_pairs == 0) ++g.missed_zero;
    if (e.missed_pairs == 1 || e.missed_pairs == 2) ++g.missed_one_or_two;
    (e.verdict == Verdict::CorrectlyAligned ? g.correctly_aligned : g.wrongly_aligned) += 1;
    ++g.error_bins[static_cast<std::size_t>(e.error_bin)];
    g.truth_pairs += it.truth_pairs;
    g.correct_pairs += e.correct_pairs;
    g.wrong_pairs += e.wrong_pairs;
  }
  return g;
}

}  // namespace hransac
