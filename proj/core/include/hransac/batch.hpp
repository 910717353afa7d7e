#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "hransac/engine.hpp"
#include "hransac/evaluate.hpp"
#include "hransac/scene.hpp"

namespace hransac {

struct SceneItem {
  SceneParams params;
  std::uint64_t seed = 0;
};

/// Two point-set documents plus a ground-truth pair document.
struct FileItem {
  std::filesystem::path set_a;
  std::filesystem::path set_b;
  std::filesystem::path truth;
};

struct BatchItem {
  std::string id;
  std::variant<SceneItem, FileItem> source;
};

struct ItemReport {
  std::string id;
  std::optional<RansacResult> result;
  std::optional<EvalReport> eval;
  std::size_t truth_pairs = 0;
  /// The run evaluated a sample made only of ground-truth pairs.
  bool planted_hit = false;
  std::string error;
};

/// Batch totals laid out like a per-frame-pair results table.
struct AggregateReport {
  std::size_t items = 0;
  std::size_t processed = 0;  // items that returned a homography
  std::size_t ineligible = 0;
  std::size_t no_model = 0;
  std::size_t errors = 0;

  std::size_t wrong_zero = 0;
  std::size_t wrong_at_least_one = 0;
  std::size_t missed_zero = 0;
  std::size_t missed_one_or_two = 0;
  std::size_t correctly_aligned = 0;
  std::size_t wrongly_aligned = 0;
  std::array<std::size_t, 3> error_bins{};  // indexed by ErrorBin

  std::size_t truth_pairs = 0;    // summed over processed items
  std::size_t correct_pairs = 0;  // summed over processed items
  std::size_t wrong_pairs = 0;    // summed over processed items

  std::size_t planted_hits = 0;
  std::uint64_t iterations_used = 0;
  std::uint64_t hypotheses_evaluated = 0;
  std::uint64_t q_gate_rejections = 0;
  std::uint64_t posthoc_rejections = 0;
  std::uint64_t exit_posthoc_rejections = 0;

  /// Fraction of items whose run drew the planted sample.
  double success_fraction() const noexcept {
    return items ? static_cast<double>(planted_hits) / static_cast<double>(items) : 0.0;
  }
};

struct BatchReport {
  std::vector<ItemReport> items;
  AggregateReport aggregate;
};

struct BatchOptions {
  RansacConfig config;
  /// Items processed concurrently. Never changes the report.
  int parallelism = 1;
  /// When set and config.max_iterations is not, synthetic items get the
  /// expected-iteration budget of their own parameters at this p_r.
  std::optional<double> scene_p_r;
};

/// Runs every item; item i uses engine seed derive_seed(config.seed, i).
/// Per-item failures are recorded in ItemReport::error.
/// Throws std::invalid_argument on an empty manifest.
BatchReport batch_run(std::span<const BatchItem> items, const BatchOptions& options);

/// Recomputes the totals of a set of item reports.
AggregateReport aggregate(std::span<const ItemReport> items);

/// Budget used for a synthetic item under `options`; 0 defers to
/// default_max_iterations().
std::uint64_t scene_budget(const SceneParams& params, const BatchOptions& options);

}  // namespace hransac
