#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hransac/analysis.hpp"
#include "hransac/batch.hpp"
#include "hransac/engine.hpp"
#include "hransac/evaluate.hpp"
#include "hransac/sampling.hpp"
#include "hransac/scene.hpp"

// JSON documents exchanged by the command line tool. Every reader throws
// FormatError on malformed input.

namespace hransac {

/// Point coordinates are written with 9 significant digits.
double round_significant(double v, int digits = 9) noexcept;

/// {"image": id, "extent": [w, h], "points": [{"x", "y", "class"?}, ...]}
/// "class" is 1 or 2 on every point or on none.
PointSet point_set_from_json(std::string_view text);
std::string point_set_to_json(const PointSet& set);
PointSet read_point_set(const std::filesystem::path& path);
void write_point_set(const std::filesystem::path& path, const PointSet& set);

/// {"set_a"?: path, "set_b"?: path, "pairs": [{"index_a", "index_b"}, ...]}
/// Indices are zero based; paths are relative to the truth document.
struct TruthFile {
  std::vector<TruthPair> pairs;
  std::optional<std::filesystem::path> set_a;
  std::optional<std::filesystem::path> set_b;
};

TruthFile truth_from_json(std::string_view text);
std::string truth_to_json(const TruthFile& truth);
TruthFile read_truth(const std::filesystem::path& path);
void write_truth(const std::filesystem::path& path, const TruthFile& truth);

/// Homography document: row-major matrix, normalization tag, status,
/// inlier pairs, threshold and diagnostic counters.
std::string result_to_json(const RansacResult& result, const RansacConfig& config);
RansacResult result_from_json(std::string_view text);

std::string eval_report_to_json(const EvalReport& report);
std::string q_distribution_to_json(const QDistribution& d);
std::string batch_report_to_json(const BatchReport& report, bool include_items = true);

/// {"items": [{"id", "set_a", "set_b", "truth"} | {"id", "scene": {...}, "seed"}]}
/// File paths are resolved against `base_dir`.
std::vector<BatchItem> manifest_from_json(std::string_view text, const std::filesystem::path& base_dir);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace hransac
