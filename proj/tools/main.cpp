#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hransac/analysis.hpp"
#include "hransac/batch.hpp"
#include "hransac/engine.hpp"
#include "hransac/errors.hpp"
#include "hransac/evaluate.hpp"
#include "hransac/io.hpp"
#include "hransac/matching.hpp"

namespace {

using namespace hransac;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitNoModel = 2;

// Thrown for argument combinations CLI11 cannot express.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    std::cout.flush();
  } else {
    write_text(out, text);
  }
}

std::array<std::size_t, 2> pair_of(const std::vector<std::size_t>& v, const char* what) {
  if (v.size() != 2) throw UsageError(std::string(what) + " needs two comma separated counts");
  return {v[0], v[1]};
}

// Options shared by every subcommand that runs the engine.
struct EngineOptions {
  double lambda = kDefaultLambda;
  std::optional<std::uint64_t> max_iter;
  std::size_t exit_inliers = 6;
  std::uint64_t seed = 0;
  std::string matching = "one-to-one";
  std::string allocation = "proportional";
  bool no_refit = false;

  void attach(CLI::App* app) {
    app->add_option("--lambda", lambda, "threshold as a fraction of the widest B point spread")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app->add_option("--max-iter", max_iter, "budget of gate-passing hypotheses")->check(CLI::PositiveNumber);
    app->add_option("--exit-inliers", exit_inliers, "inlier count that ends the run early")
        ->capture_default_str()
        ->check(CLI::Range(std::size_t{4}, std::numeric_limits<std::size_t>::max()));
    app->add_option("--seed", seed, "random seed")->capture_default_str();
    app->add_option("--matching", matching, "inlier pairing rule")
        ->capture_default_str()
        ->check(CLI::IsMember({"one-to-one", "nearest"}));
    app->add_option("--allocation", allocation, "class split of the four sample slots")
        ->capture_default_str()
        ->check(CLI::IsMember({"proportional", "per-slot"}));
    app->add_flag("--no-refit", no_refit, "keep the four-point model instead of refitting on all inliers");
  }

  RansacConfig config(int threads) const {
    RansacConfig c;
    c.lambda = lambda;
    c.max_iterations = max_iter;
    c.exit_inliers = exit_inliers;
    c.seed = seed;
    c.refit_on_inliers = !no_refit;
    c.matching_rule = matching == "nearest" ? MatchingRule::NearestPerA : MatchingRule::OneToOne;
    c.allocation_rule = allocation == "per-slot" ? AllocationRule::PerSlot : AllocationRule::Proportional;
    c.threads = threads;
    return c;
  }
};

struct EstimateArgs {
  std::string set_a, set_b, out;
  std::vector<double> extent;
  EngineOptions engine;
};

int cmd_estimate(const EstimateArgs& args, int threads) {
  const PointSet a = read_point_set(args.set_a);
  const PointSet b = read_point_set(args.set_b);
  RansacConfig cfg = args.engine.config(threads);
  if (!args.extent.empty()) {
    if (args.extent.size() != 2) throw UsageError("--extent needs WIDTH,HEIGHT");
    cfg.image_b_extent = Extent{args.extent[0], args.extent[1]};
  }
  const RansacResult r = run(a, b, cfg);
  emit(result_to_json(r, cfg), args.out);
  return r.homography ? kExitOk : kExitNoModel;
}

struct SimulateArgs {
  std::vector<std::size_t> points_a, points_b, k;
  double noise = 0.0;
  std::size_t trials = 0;
  double p_r = 0.95;
  std::size_t clusters = 0;
  double cluster_sigma = 20.0;
  bool items = false;
  std::string out;
  EngineOptions engine;
};

int cmd_simulate(const SimulateArgs& args, int threads) {
  SceneParams p;
  p.points_a = pair_of(args.points_a, "--points-a");
  p.points_b = pair_of(args.points_b, "--points-b");
  p.correspondences = pair_of(args.k, "--k");
  p.noise_sigma = args.noise;
  p.clusters = args.clusters;
  p.cluster_sigma = args.cluster_sigma;
  validate(p);
  if (!(args.p_r > 0.0 && args.p_r < 1.0)) throw UsageError("--p-r must lie in (0, 1)");

  std::vector<BatchItem> items;
  items.reserve(args.trials);
  for (std::size_t i = 0; i < args.trials; ++i) {
    items.push_back({"trial-" + std::to_string(i), SceneItem{p, derive_seed(args.engine.seed, i)}});
  }
  BatchOptions o;
  o.config = args.engine.config(1);
  o.parallelism = threads;
  o.scene_p_r = args.p_r;
  emit(batch_report_to_json(batch_run(items, o), args.items), args.out);
  return kExitOk;
}

struct BatchArgs {
  std::string manifest, out;
  std::optional<double> p_r;
  bool items = false;
  EngineOptions engine;
};

int cmd_batch(const BatchArgs& args, int threads) {
  const std::filesystem::path path(args.manifest);
  const auto items = manifest_from_json(read_text(path), path.parent_path());
  BatchOptions o;
  o.config = args.engine.config(1);
  o.parallelism = threads;
  o.scene_p_r = args.p_r;
  emit(batch_report_to_json(batch_run(items, o), args.items), args.out);
  return kExitOk;
}

struct GenerateArgs {
  std::vector<std::size_t> points_a, points_b, k;
  double noise = 0.0;
  std::uint64_t seed = 0;
  std::size_t clusters = 0;
  std::string dir;
};

int cmd_generate(const GenerateArgs& args) {
  SceneParams p;
  p.points_a = pair_of(args.points_a, "--points-a");
  p.points_b = pair_of(args.points_b, "--points-b");
  p.correspondences = pair_of(args.k, "--k");
  p.noise_sigma = args.noise;
  p.clusters = args.clusters;
  const SyntheticScene scene = generate_scene(p, args.seed);
  const std::filesystem::path dir(args.dir);
  std::filesystem::create_directories(dir);
  write_point_set(dir / "set_a.json", scene.set_a);
  write_point_set(dir / "set_b.json", scene.set_b);
  write_truth(dir / "truth.json", {scene.truth_pairs, "set_a.json", "set_b.json"});
  return kExitOk;
}

struct QstatsArgs {
  std::uint64_t samples = 100000;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_qstats(const QstatsArgs& args, int threads) {
  emit(q_distribution_to_json(estimate_q_distribution(args.samples, args.seed, threads)), args.out);
  return kExitOk;
}

struct NiterArgs {
  std::vector<std::size_t> counts, k;
  std::size_t e1 = 4;
  double p_r = 0.95;
  double gate_factor = kGateFactor;
  bool sweep = false;
  std::size_t min_points = 4, max_points = 30, step = 1, k_total = 4;
  std::string delimiter = ",";
  std::string out;
};

std::string count_text(const IterationCount& n) { return n ? std::to_string(*n) : "unbounded"; }

int cmd_niter(const NiterArgs& args) {
  if (args.sweep) {
    SweepSpec spec{args.min_points, args.max_points, args.step, args.k_total, args.p_r, args.gate_factor};
    const std::string& d = args.delimiter;
    std::ostringstream os;
    os << "points_per_image" << d << "classes" << d << "n1" << d << "n2" << d << "k1" << d << "k2" << d << "e1" << d
       << "n_iter\n";
    for (const auto& row : iteration_curve(spec)) {
      const auto& q = row.query;
      os << row.points_per_image << d << row.classes << d << q.n1_a << d << q.n2_a << d << q.k1 << d << q.k2 << d
         << q.e1 << d << count_text(row.n_iter) << '\n';
    }
    emit(os.str(), args.out);
    return kExitOk;
  }
  if (args.counts.size() != 4) throw UsageError("--counts needs N1A,N2A,N1B,N2B");
  const auto k = pair_of(args.k, "--k");
  IterationQuery q{args.counts[0], args.counts[1], args.counts[2], args.counts[3], k[0], k[1],
                   args.e1,        args.p_r,       args.gate_factor};
  emit(count_text(expected_iterations(q)) + "\n", args.out);
  return kExitOk;
}

struct EvalArgs {
  std::string result, truth, set_a, set_b, out;
  double lambda = kDefaultLambda;
};

int cmd_eval(const EvalArgs& args) {
  const RansacResult r = result_from_json(read_text(args.result));
  const TruthFile truth = read_truth(args.truth);
  const auto pick = [](const std::string& given, const std::optional<std::filesystem::path>& from_truth,
                       const char* flag) {
    if (!given.empty()) return std::filesystem::path(given);
    if (from_truth) return *from_truth;
    throw UsageError(std::string(flag) + " is required when the truth file names no point set");
  };
  const PointSet a = read_point_set(pick(args.set_a, truth.set_a, "--set-a"));
  const PointSet b = read_point_set(pick(args.set_b, truth.set_b, "--set-b"));
  if (!r.homography) {
    std::cerr << "hransac: result carries no homography\n";
    return kExitNoModel;
  }
  emit(eval_report_to_json(evaluate(r, a, b, truth.pairs, adaptive_threshold(b, args.lambda))), args.out);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Homography estimation between unpaired, labeled point sets"};
  app.require_subcommand(1);
  int threads = 1;
  app.add_option("--threads", threads, "worker threads; never changes results")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  auto add_threads = [&threads](CLI::App* sub) {
    sub->add_option("--threads", threads, "worker threads; never changes results")->check(CLI::PositiveNumber);
  };

  EstimateArgs est;
  auto* estimate = app.add_subcommand("estimate", "estimate the homography mapping set B onto set A");
  estimate->add_option("--set-a", est.set_a, "point set of image A")->required()->check(CLI::ExistingFile);
  estimate->add_option("--set-b", est.set_b, "point set of image B")->required()->check(CLI::ExistingFile);
  estimate->add_option("--extent", est.extent, "image B size for the corner test, WIDTH,HEIGHT")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  estimate->add_option("--out", est.out, "write the result here instead of stdout");
  est.engine.attach(estimate);
  add_threads(estimate);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "run the estimator on synthetic planted scenes");
  simulate->add_option("--points-a", sim.points_a, "class 1 and class 2 points in image A")
      ->required()
      ->delimiter(',');
  simulate->add_option("--points-b", sim.points_b, "class 1 and class 2 points in image B")
      ->required()
      ->delimiter(',');
  simulate->add_option("--k", sim.k, "planted correspondences per class")->required()->delimiter(',');
  simulate->add_option("--noise", sim.noise, "pixel noise on planted A points")->required()->check(CLI::NonNegativeNumber);
  simulate->add_option("--trials", sim.trials, "number of scenes")->required()->check(CLI::PositiveNumber);
  simulate->add_option("--p-r", sim.p_r, "confidence for the default budget")->capture_default_str();
  simulate->add_option("--clusters", sim.clusters, "place points around this many clusters (0 = uniform)");
  simulate->add_option("--cluster-sigma", sim.cluster_sigma, "cluster spread in pixels")->check(CLI::PositiveNumber);
  simulate->add_flag("--items", sim.items, "include per-scene reports");
  simulate->add_option("--out", sim.out, "write the report here instead of stdout");
  sim.engine.attach(simulate);
  simulate->get_option("--seed")->required();
  add_threads(simulate);

  BatchArgs bat;
  auto* batch = app.add_subcommand("batch", "run every item of a manifest and aggregate the scores");
  batch->add_option("--manifest", bat.manifest, "manifest document")->required()->check(CLI::ExistingFile);
  batch->add_option("--p-r", bat.p_r, "budget synthetic items for this confidence");
  batch->add_flag("--items", bat.items, "include per-item reports");
  batch->add_option("--out", bat.out, "write the report here instead of stdout");
  bat.engine.attach(batch);
  add_threads(batch);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "write a synthetic scene: set_a.json, set_b.json, truth.json");
  generate->add_option("--points-a", gen.points_a, "class 1 and class 2 points in image A")
      ->required()
      ->delimiter(',');
  generate->add_option("--points-b", gen.points_b, "class 1 and class 2 points in image B")
      ->required()
      ->delimiter(',');
  generate->add_option("--k", gen.k, "planted correspondences per class")->required()->delimiter(',');
  generate->add_option("--noise", gen.noise, "pixel noise on planted A points")->check(CLI::NonNegativeNumber);
  generate->add_option("--clusters", gen.clusters, "place points around this many clusters (0 = uniform)");
  generate->add_option("--seed", gen.seed, "random seed")->required();
  generate->add_option("--dir", gen.dir, "output directory")->required();
  add_threads(generate);

  QstatsArgs qs;
  auto* qstats = app.add_subcommand("qstats", "Monte Carlo frequencies of quadrilateral Q values");
  qstats->add_option("--samples", qs.samples, "quadrilaterals to classify")->required()->check(CLI::PositiveNumber);
  qstats->add_option("--seed", qs.seed, "random seed")->required();
  qstats->add_option("--out", qs.out, "write the report here instead of stdout");
  add_threads(qstats);

  NiterArgs ni;
  auto* niter = app.add_subcommand("niter", "expected iterations for a target success probability");
  auto* counts = niter->add_option("--counts", ni.counts, "N1A,N2A,N1B,N2B")->delimiter(',');
  auto* kopt = niter->add_option("--k", ni.k, "correspondences per class, K1,K2")->delimiter(',');
  niter->add_option("--e1", ni.e1, "class 1 slots of the sample")->capture_default_str()->check(CLI::Range(0, 4));
  niter->add_option("--p-r", ni.p_r, "target success probability")->capture_default_str();
  niter->add_option("--gate-factor", ni.gate_factor, "fraction of samples passing the Q gate")->capture_default_str();
  auto* sweep = niter->add_flag("--sweep", ni.sweep, "tabulate single and two class families over points per image");
  niter->add_option("--min-points", ni.min_points, "sweep start")->capture_default_str();
  niter->add_option("--max-points", ni.max_points, "sweep end")->capture_default_str();
  niter->add_option("--step", ni.step, "sweep step")->capture_default_str();
  niter->add_option("--k-total", ni.k_total, "correspondences in the sweep")->capture_default_str();
  niter->add_option("--delimiter", ni.delimiter, "sweep column separator")->capture_default_str();
  niter->add_option("--out", ni.out, "write the answer here instead of stdout");
  counts->excludes(sweep);
  kopt->excludes(sweep);
  add_threads(niter);

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "score a result against ground-truth pairs");
  eval->add_option("--result", ev.result, "result document from estimate")->required()->check(CLI::ExistingFile);
  eval->add_option("--truth", ev.truth, "ground-truth pair document")->required()->check(CLI::ExistingFile);
  eval->add_option("--lambda", ev.lambda, "threshold fraction")->required()->check(CLI::PositiveNumber);
  eval->add_option("--set-a", ev.set_a, "point set of image A (defaults to the truth document's)");
  eval->add_option("--set-b", ev.set_b, "point set of image B (defaults to the truth document's)");
  eval->add_option("--out", ev.out, "write the report here instead of stdout");
  add_threads(eval);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (estimate->parsed()) return cmd_estimate(est, threads);
    if (simulate->parsed()) return cmd_simulate(sim, threads);
    if (batch->parsed()) return cmd_batch(bat, threads);
    if (generate->parsed()) return cmd_generate(gen);
    if (qstats->parsed()) return cmd_qstats(qs, threads);
    if (niter->parsed()) return cmd_niter(ni);
    if (eval->parsed()) return cmd_eval(ev);
  } catch (const NoModel& e) {
    std::cerr << "hransac: " << e.what() << '\n';
    return kExitNoModel;
  } catch (const std::exception& e) {
    std::cerr << "hransac: " << e.what() << '\n';
    return kExitInvalid;
  }
  return kExitInvalid;
}
