#include "hransac/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <type_traits>

#include <json.hpp>

#include "hransac/errors.hpp"

namespace hransac {

using nlohmann::json;

namespace {

constexpr int kIndent = 2;

json parse(std::string_view text, std::string_view what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string(what) + ": " + e.what());
  }
}

template <typename T>
T field(const json& j, const char* key, std::string_view what) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(std::string(what) + ": missing field '" + key + "'");
  if constexpr (std::is_integral_v<T> && std::is_unsigned_v<T> && !std::is_same_v<T, bool>) {
    if (!j.at(key).is_number_unsigned()) {
      throw FormatError(std::string(what) + ": field '" + key + "' must be a non-negative integer");
    }
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw FormatError(std::string(what) + ": bad field '" + key + "': " + e.what());
  }
}

json label_json(ClassLabel l) {
  switch (l) {
    case ClassLabel::Class1: return 1;
    case ClassLabel::Class2: return 2;
    case ClassLabel::Unlabeled: break;
  }
  return nullptr;
}

ClassLabel label_from(const json& j) {
  if (j.is_null()) return ClassLabel::Unlabeled;
  if (j.is_number_integer()) {
    const auto v = j.get<long long>();
    if (v == 1) return ClassLabel::Class1;
    if (v == 2) return ClassLabel::Class2;
  }
  throw FormatError("class must be 1 or 2");
}

RunStatus status_from(const std::string& s) {
  for (auto st : {RunStatus::EarlyExit, RunStatus::BestEffortAtExhaustion, RunStatus::NoModelFound,
                  RunStatus::Ineligible}) {
    if (to_string(st) == s) return st;
  }
  throw FormatError("unknown status '" + s + "'");
}

json optional_count(const std::optional<std::uint64_t>& v) { return v ? json(*v) : json(nullptr); }

json eval_json(const EvalReport& r) {
  json j;
  j["correct_pairs"] = r.correct_pairs;
  j["wrong_pairs"] = r.wrong_pairs;
  j["missed_pairs"] = r.missed_pairs;
  j["verdict"] = to_string(r.verdict);
  j["mean_reprojection_error"] =
      std::isfinite(r.mean_reprojection_error) ? json(r.mean_reprojection_error) : json(nullptr);
  j["error_bin"] = to_string(r.error_bin);
  return j;
}

json diagnostics_json(const RansacResult& r) {
  json d;
  d["budget"] = r.budget;
  d["iterations_used"] = r.iterations_used;
  d["hypotheses_evaluated"] = r.hypotheses_evaluated;
  d["q_gate_rejections"] = r.q_gate_rejections;
  d["degenerate_fits"] = r.degenerate_fits;
  d["posthoc_rejections"] = r.posthoc_rejections;
  d["exit_posthoc_rejections"] = r.exit_posthoc_rejections;
  d["winning_draw"] = optional_count(r.winning_draw);
  d["refit_applied"] = r.refit_applied;
  d["dlt_rank_rule"] = "sigma_8 > 1e-8 * sigma_1";
  return d;
}

json inliers_json(const std::vector<InlierPair>& inliers) {
  json arr = json::array();
  for (const auto& p : inliers) {
    arr.push_back({{"index_a", p.index_a}, {"index_b", p.index_b}, {"class", label_json(p.label)}, {"distance", p.distance}});
  }
  return arr;
}

}  // namespace

double round_significant(double v, int digits) noexcept {
  if (!std::isfinite(v) || v == 0.0) return v;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return std::strtod(buf, nullptr);
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

PointSet point_set_from_json(std::string_view text) {
  const json j = parse(text, "point set");
  const auto id = j.contains("image") ? field<std::string>(j, "image", "point set") : std::string{};
  std::optional<Extent> extent;
  if (j.contains("extent") && !j.at("extent").is_null()) {
    const auto e = field<std::vector<double>>(j, "extent", "point set");
    if (e.size() != 2) throw FormatError("point set: extent must be [width, height]");
    extent = Extent{e[0], e[1]};
  }
  const json& pts = j.contains("points") ? j.at("points") : throw FormatError("point set: missing field 'points'");
  if (!pts.is_array()) throw FormatError("point set: 'points' must be an array");
  std::vector<LabeledPoint> out;
  out.reserve(pts.size());
  for (const auto& p : pts) {
    LabeledPoint lp;
    lp.position = {field<double>(p, "x", "point"), field<double>(p, "y", "point")};
    lp.label = p.contains("class") ? label_from(p.at("class")) : ClassLabel::Unlabeled;
    out.push_back(lp);
  }
  try {
    return PointSet(std::move(out), extent, id);
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
}

std::string point_set_to_json(const PointSet& set) {
  json j;
  j["image"] = set.image_id();
  j["extent"] = set.extent() ? json::array({set.extent()->width, set.extent()->height}) : json(nullptr);
  json pts = json::array();
  for (const auto& p : set.points()) {
    json e{{"x", round_significant(p.position.x)}, {"y", round_significant(p.position.y)}};
    if (p.label != ClassLabel::Unlabeled) e["class"] = label_json(p.label);
    pts.push_back(std::move(e));
  }
  j["points"] = std::move(pts);
  return j.dump(kIndent) + "\n";
}

PointSet read_point_set(const std::filesystem::path& path) { return point_set_from_json(read_text(path)); }

void write_point_set(const std::filesystem::path& path, const PointSet& set) {
  write_text(path, point_set_to_json(set));
}

TruthFile truth_from_json(std::string_view text) {
  const json j = parse(text, "truth");
  TruthFile t;
  if (j.contains("set_a")) t.set_a = field<std::string>(j, "set_a", "truth");
  if (j.contains("set_b")) t.set_b = field<std::string>(j, "set_b", "truth");
  const json& pairs = j.contains("pairs") ? j.at("pairs") : throw FormatError("truth: missing field 'pairs'");
  if (!pairs.is_array()) throw FormatError("truth: 'pairs' must be an array");
  for (const auto& p : pairs) {
    t.pairs.push_back({field<std::size_t>(p, "index_a", "truth pair"), field<std::size_t>(p, "index_b", "truth pair")});
  }
  return t;
}

std::string truth_to_json(const TruthFile& t) {
  json j;
  if (t.set_a) j["set_a"] = t.set_a->generic_string();
  if (t.set_b) j["set_b"] = t.set_b->generic_string();
  json pairs = json::array();
  for (const auto& p : t.pairs) pairs.push_back({{"index_a", p.index_a}, {"index_b", p.index_b}});
  j["pairs"] = std::move(pairs);
  return j.dump(kIndent) + "\n";
}

TruthFile read_truth(const std::filesystem::path& path) {
  TruthFile t = truth_from_json(read_text(path));
  const auto dir = path.parent_path();
  if (t.set_a && t.set_a->is_relative()) t.set_a = dir / *t.set_a;
  if (t.set_b && t.set_b->is_relative()) t.set_b = dir / *t.set_b;
  return t;
}

void write_truth(const std::filesystem::path& path, const TruthFile& truth) {
  write_text(path, truth_to_json(truth));
}

std::string result_to_json(const RansacResult& r, const RansacConfig& cfg) {
  json j;
  j["status"] = to_string(r.status);
  if (r.homography) {
    j["homography"] = {{"matrix", r.homography->row_major()}, {"normalization", to_string(r.homography->normalization())}};
  } else {
    j["homography"] = nullptr;
  }
  j["inliers"] = inliers_json(r.inliers);
  j["threshold"] = {{"lambda", r.threshold.lambda}, {"t", r.threshold.t}};
  j["extent"] = {r.extent.width, r.extent.height};
  j["eligibility"] = {{"n1", r.eligibility.n1}, {"n2", r.eligibility.n2}, {"eligible", r.eligibility.eligible}};
  j["diagnostics"] = diagnostics_json(r);
  j["config"] = {{"lambda", cfg.lambda},
                 {"max_iterations", optional_count(cfg.max_iterations)},
                 {"exit_inliers", cfg.exit_inliers},
                 {"seed", cfg.seed},
                 {"refit_on_inliers", cfg.refit_on_inliers},
                 {"matching", to_string(cfg.matching_rule)},
                 {"allocation", to_string(cfg.allocation_rule)}};
  return j.dump(kIndent) + "\n";
}

RansacResult result_from_json(std::string_view text) {
  const json j = parse(text, "result");
  RansacResult r;
  r.status = status_from(field<std::string>(j, "status", "result"));
  try {
    if (j.contains("homography") && !j.at("homography").is_null()) {
      const auto m = field<std::vector<double>>(j.at("homography"), "matrix", "homography");
      if (m.size() != 9) throw FormatError("homography: matrix needs 9 numbers");
      r.homography = Homography::from_row_major(std::span<const double, 9>(m.data(), 9));
    }
  } catch (const DegenerateConfiguration& e) {
    throw FormatError(std::string("homography: ") + e.what());
  }
  if (j.contains("inliers")) {
    for (const auto& p : j.at("inliers")) {
      InlierPair ip;
      ip.index_a = field<std::size_t>(p, "index_a", "inlier");
      ip.index_b = field<std::size_t>(p, "index_b", "inlier");
      ip.label = p.contains("class") ? label_from(p.at("class")) : ClassLabel::Unlabeled;
      ip.distance = p.contains("distance") ? field<double>(p, "distance", "inlier") : 0.0;
      r.inliers.push_back(ip);
    }
  }
  if (j.contains("threshold")) {
    r.threshold.lambda = field<double>(j.at("threshold"), "lambda", "threshold");
    r.threshold.t = field<double>(j.at("threshold"), "t", "threshold");
  }
  if (j.contains("diagnostics")) {
    const json& d = j.at("diagnostics");
    auto count = [&](const char* key) { return d.contains(key) ? field<std::uint64_t>(d, key, "diagnostics") : 0; };
    r.budget = count("budget");
    r.iterations_used = count("iterations_used");
    r.hypotheses_evaluated = count("hypotheses_evaluated");
    r.q_gate_rejections = count("q_gate_rejections");
    r.degenerate_fits = count("degenerate_fits");
    r.posthoc_rejections = count("posthoc_rejections");
    r.exit_posthoc_rejections = count("exit_posthoc_rejections");
  }
  return r;
}

std::string eval_report_to_json(const EvalReport& r) { return eval_json(r).dump(kIndent) + "\n"; }

std::string q_distribution_to_json(const QDistribution& d) {
  json j{{"p0", d.p0},
         {"p2", d.p2},
         {"p4", d.p4},
         {"samples", d.samples},
         {"counts", {{"q0", d.count0}, {"q2", d.count2}, {"q4", d.count4}}},
         {"degenerate_redraws", d.degenerate_redraws},
         {"gate_survival", d.gate_survival()}};
  return j.dump(kIndent) + "\n";
}

std::string batch_report_to_json(const BatchReport& report, bool include_items) {
  const auto& g = report.aggregate;
  json agg{{"items", g.items},
           {"processed", g.processed},
           {"ineligible", g.ineligible},
           {"no_model", g.no_model},
           {"errors", g.errors},
           {"frame_pairs_wrong_0", g.wrong_zero},
           {"frame_pairs_wrong_at_least_1", g.wrong_at_least_one},
           {"frame_pairs_missed_0", g.missed_zero},
           {"frame_pairs_missed_1_or_2", g.missed_one_or_two},
           {"correctly_aligned", g.correctly_aligned},
           {"wrongly_aligned", g.wrongly_aligned},
           {"error_bins", {{"under_5", g.error_bins[0]}, {"5_to_10", g.error_bins[1]}, {"over_10", g.error_bins[2]}}},
           {"truth_pairs", g.truth_pairs},
           {"correct_pairs", g.correct_pairs},
           {"wrong_pairs", g.wrong_pairs},
           {"planted_hits", g.planted_hits},
           {"success_fraction", g.success_fraction()},
           {"iterations_used", g.iterations_used},
           {"hypotheses_evaluated", g.hypotheses_evaluated},
           {"q_gate_rejections", g.q_gate_rejections},
           {"posthoc_rejections", g.posthoc_rejections},
           {"exit_posthoc_rejections", g.exit_posthoc_rejections}};
  json j{{"aggregate", std::move(agg)}};
  if (include_items) {
    json items = json::array();
    for (const auto& it : report.items) {
      json e{{"id", it.id}, {"truth_pairs", it.truth_pairs}, {"planted_hit", it.planted_hit}};
      if (!it.error.empty()) e["error"] = it.error;
      if (it.result) {
        e["status"] = to_string(it.result->status);
        e["homography"] = it.result->homography ? json(it.result->homography->row_major()) : json(nullptr);
        e["inliers"] = it.result->inliers.size();
        e["diagnostics"] = diagnostics_json(*it.result);
      }
      e["eval"] = it.eval ? eval_json(*it.eval) : json(nullptr);
      items.push_back(std::move(e));
    }
    j["items"] = std::move(items);
  }
  return j.dump(kIndent) + "\n";
}

std::vector<BatchItem> manifest_from_json(std::string_view text, const std::filesystem::path& base_dir) {
  const json j = parse(text, "manifest");
  const json& items = j.contains("items") ? j.at("items") : throw FormatError("manifest: missing field 'items'");
  if (!items.is_array()) throw FormatError("manifest: 'items' must be an array");
  std::vector<BatchItem> out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const json& it = items[i];
    BatchItem item;
    item.id = it.contains("id") ? field<std::string>(it, "id", "manifest item") : "item-" + std::to_string(i);
    if (it.contains("scene")) {
      const json& s = it.at("scene");
      SceneItem si;
      auto pair = [&](const char* key, std::array<std::size_t, 2>& dst) {
        if (!s.contains(key)) return;
        const auto v = field<std::vector<std::size_t>>(s, key, "scene");
        if (v.size() != 2) throw FormatError(std::string("scene: '") + key + "' needs two counts");
        dst = {v[0], v[1]};
      };
      pair("points_a", si.params.points_a);
      pair("points_b", si.params.points_b);
      pair("k", si.params.correspondences);
      if (s.contains("noise")) si.params.noise_sigma = field<double>(s, "noise", "scene");
      if (s.contains("extent")) {
        const auto e = field<std::vector<double>>(s, "extent", "scene");
        if (e.size() != 2) throw FormatError("scene: extent must be [width, height]");
        si.params.extent = {e[0], e[1]};
      }
      if (s.contains("clusters")) si.params.clusters = field<std::size_t>(s, "clusters", "scene");
      if (s.contains("cluster_sigma")) si.params.cluster_sigma = field<double>(s, "cluster_sigma", "scene");
      if (s.contains("labeled")) si.params.labeled = field<bool>(s, "labeled", "scene");
      if (s.contains("max_displacement_x")) si.params.max_displacement_x = field<double>(s, "max_displacement_x", "scene");
      if (s.contains("max_displacement_y")) si.params.max_displacement_y = field<double>(s, "max_displacement_y", "scene");
      si.seed = it.contains("seed") ? field<std::uint64_t>(it, "seed", "manifest item") : i;
      item.source = si;
    } else {
      auto path = [&](const char* key) {
        std::filesystem::path p = field<std::string>(it, key, "manifest item");
        return p.is_relative() ? base_dir / p : p;
      };
      item.source = FileItem{path("set_a"), path("set_b"), path("truth")};
    }
    out.push_back(std::move(item));
  }
  return out;
}

}  // namespace hransac
