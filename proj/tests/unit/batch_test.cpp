#include <gtest/gtest.h>

#include <filesystem>

#include "hransac/batch.hpp"
#include "hransac/io.hpp"

using namespace hransac;

namespace {

std::vector<BatchItem> scene_items(const SceneParams& p, std::size_t n, std::uint64_t first_seed = 0) {
  std::vector<BatchItem> items;
  for (std::size_t i = 0; i < n; ++i) items.push_back({"s" + std::to_string(i), SceneItem{p, first_seed + i}});
  return items;
}

SceneParams five_five() {
  SceneParams p;
  p.points_a = {5, 5};
  p.points_b = {5, 5};
  p.correspondences = {3, 3};
  p.noise_sigma = 0.5;
  return p;
}

}  // namespace

TEST(BatchRun, EmptyManifestIsAnError) {
  EXPECT_THROW(batch_run({}, {}), std::invalid_argument);
}

TEST(BatchRun, SingleItemAggregateMirrorsItsReport) {
  BatchOptions o;
  o.config.max_iterations = 5000;
  const auto items = scene_items(five_five(), 1, 3);
  const auto rep = batch_run(items, o);
  ASSERT_EQ(rep.items.size(), 1u);
  const auto& it = rep.items[0];
  ASSERT_TRUE(it.result.has_value());
  ASSERT_TRUE(it.eval.has_value());
  const auto& g = rep.aggregate;
  EXPECT_EQ(g.items, 1u);
  EXPECT_EQ(g.processed, 1u);
  EXPECT_EQ(g.correct_pairs, it.eval->correct_pairs);
  EXPECT_EQ(g.wrong_pairs, it.eval->wrong_pairs);
  EXPECT_EQ(g.truth_pairs, 6u);
  EXPECT_EQ(g.correctly_aligned, it.eval->verdict == Verdict::CorrectlyAligned ? 1u : 0u);
  EXPECT_EQ(g.iterations_used, it.result->iterations_used);
  EXPECT_EQ(g.posthoc_rejections, it.result->posthoc_rejections);
}

TEST(BatchRun, AggregateIsSumOfItems) {
  BatchOptions o;
  o.config.max_iterations = 800;
  auto items = scene_items(five_five(), 30);
  SceneParams bad;
  bad.correspondences = {1, 1};
  items.push_back({"bad", SceneItem{bad, 1}});
  const auto rep = batch_run(items, o);
  const auto& g = rep.aggregate;
  EXPECT_EQ(g.errors, 1u);
  EXPECT_FALSE(rep.items.back().error.empty());

  std::size_t correct = 0, wrong = 0, aligned = 0, hits = 0;
  std::uint64_t used = 0, rejected = 0;
  for (const auto& it : rep.items) {
    hits += it.planted_hit ? 1 : 0;
    if (it.result) {
      used += it.result->iterations_used;
      rejected += it.result->q_gate_rejections;
    }
    if (!it.eval) continue;
    correct += it.eval->correct_pairs;
    wrong += it.eval->wrong_pairs;
    aligned += it.eval->verdict == Verdict::CorrectlyAligned ? 1 : 0;
  }
  EXPECT_EQ(g.correct_pairs, correct);
  EXPECT_EQ(g.wrong_pairs, wrong);
  EXPECT_EQ(g.correctly_aligned, aligned);
  EXPECT_EQ(g.planted_hits, hits);
  EXPECT_EQ(g.iterations_used, used);
  EXPECT_EQ(g.q_gate_rejections, rejected);
  EXPECT_EQ(g.processed + g.ineligible + g.no_model + g.errors, g.items);
  EXPECT_EQ(g.wrong_zero + g.wrong_at_least_one, g.processed);
  EXPECT_EQ(g.correctly_aligned + g.wrongly_aligned, g.processed);
  EXPECT_EQ(g.error_bins[0] + g.error_bins[1] + g.error_bins[2], g.processed);

  const auto again = aggregate(rep.items);
  EXPECT_EQ(batch_report_to_json({rep.items, again}), batch_report_to_json(rep));
}

TEST(BatchRun, ParallelismDoesNotChangeReport) {
  BatchOptions o;
  o.config.max_iterations = 600;
  o.config.seed = 17;
  const auto items = scene_items(five_five(), 12);
  const auto serial = batch_report_to_json(batch_run(items, o));
  o.parallelism = 3;
  EXPECT_EQ(batch_report_to_json(batch_run(items, o)), serial);
  o.parallelism = 1;
  o.config.threads = 4;
  EXPECT_EQ(batch_report_to_json(batch_run(items, o)), serial);
}

TEST(BatchRun, CalibratedBudgetFindsPlantedSample) {
  SceneParams p;
  p.noise_sigma = 0.1;
  BatchOptions o;
  o.scene_p_r = 0.95;
  o.config.seed = 5;
  const auto rep = batch_run(scene_items(p, 100, 1000), o);
  EXPECT_EQ(rep.items[0].result->budget, 348u);
  EXPECT_GE(rep.aggregate.success_fraction(), 0.90);
}

TEST(SceneBudget, Precedence) {
  SceneParams p;
  BatchOptions o;
  EXPECT_EQ(scene_budget(p, o), 0u);
  o.scene_p_r = 0.95;
  EXPECT_EQ(scene_budget(p, o), 348u);
  o.config.max_iterations = 77;
  EXPECT_EQ(scene_budget(p, o), 77u);
}

TEST(BatchRun, FileItems) {
  const auto dir = std::filesystem::temp_directory_path() / "hransac_batch_test";
  std::filesystem::create_directories(dir);
  const auto scene = generate_scene(five_five(), 21);
  write_point_set(dir / "a.json", scene.set_a);
  write_point_set(dir / "b.json", scene.set_b);
  write_truth(dir / "truth.json", {scene.truth_pairs, std::nullopt, std::nullopt});

  const auto items =
      manifest_from_json(R"({"items": [{"id": "f", "set_a": "a.json", "set_b": "b.json", "truth": "truth.json"},
                                       {"id": "missing", "set_a": "nope.json", "set_b": "b.json", "truth": "truth.json"}]})",
                         dir);
  BatchOptions o;
  o.config.max_iterations = 5000;
  const auto rep = batch_run(items, o);
  EXPECT_TRUE(rep.items[0].error.empty());
  EXPECT_EQ(rep.items[0].truth_pairs, 6u);
  EXPECT_TRUE(rep.items[0].result.has_value());
  EXPECT_FALSE(rep.items[1].error.empty());
  EXPECT_EQ(rep.aggregate.errors, 1u);
  std::filesystem::remove_all(dir);
}
