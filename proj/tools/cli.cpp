// Copyright 2026 The mpqplan Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <ostream>
#include <utility>

#include "CLI11.hpp"
#include "mpqplan/allocator.hpp"
#include "mpqplan/composition.hpp"
#include "mpqplan/error.hpp"
#include "mpqplan/io.hpp"
#include "mpqplan/pareto.hpp"
#include "mpqplan/registry.hpp"
#include "mpqplan/scorer.hpp"
#include "mpqplan/topsis.hpp"
#include "mpqplan/trace.hpp"
#include "mpqplan/weight_suite.hpp"

namespace mpqplan::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kOutDirEnv = "MPQPLAN_OUT_DIR";

/// Files produced by a command, written only once every computation succeeded.
class PendingOutputs {
 public:
  void add(fs::path path, std::string contents) { files_.emplace_back(std::move(path), std::move(contents)); }

  void commit() const {
    for (const auto& [path, contents] : files_) {
      if (path.has_parent_path()) fs::create_directories(path.parent_path());
      write_file_atomic(path, contents);
    }
  }

 private:
  std::vector<std::pair<fs::path, std::string>> files_;
};

fs::path resolve_out_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv(kOutDirEnv); env != nullptr && *env != '\0') return env;
  return ".";
}

std::string join_counts(const Registry& registry, const std::vector<int>& counts) {
  std::string s;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (i) s += " ";
    s += registry.types[i].name + "=" + std::to_string(counts[i]);
  }
  return s;
}

struct ScoreArgs {
  std::string trace;
  double gamma = 0.9;
  std::string out;
};

struct PlanArgs {
  std::string registry;
  std::string qos;
  std::string trace;
  std::string scores;
  std::string weights;
  bool suite = false;
  bool compat_residual = false;
  double gamma = 0.9;
  std::string out_dir;
  std::uint64_t dump_candidates = 0;
  unsigned workers = 0;
  std::string model;
  std::string attn_pattern = NamingScheme{}.attention_pattern;
  std::string ffn_pattern = NamingScheme{}.ffn_pattern;
  std::string passthrough_type;
};

struct EvalArgs {
  std::string baseline;
  std::string candidates;
  std::string registry;
  std::vector<std::string> benefit;
  std::string out_dir;
};

struct SuiteArgs {
  bool compat_residual = false;
  std::string out;
  std::string report;
  std::string baseline;
  std::string registry;
};

struct CountArgs {
  int layers = 0;
  int types = 0;
  bool enumerate = false;
};

void warn_missing_layers(const TraceFile& trace, std::ostream& err) {
  const auto missing = trace.missing_layers();
  if (missing.empty()) return;
  err << "warning: " << missing.size() << " layer(s) have no observations and score 0:";
  for (std::size_t i = 0; i < missing.size() && i < 16; ++i) err << " " << missing[i];
  if (missing.size() > 16) err << " ...";
  err << "\n";
}

int cmd_count(const CountArgs& a, std::ostream& out) {
  const auto n = count_compositions(a.layers, a.types);
  if (a.enumerate) {
    std::uint64_t emitted = 0;
    for (CompositionStream s(a.layers, a.types); !s.done(); s.advance()) ++emitted;
    if (emitted != n) throw RuntimeError("enumeration produced " + std::to_string(emitted) + " compositions");
  }
  out << n << "\n";
  return kExitOk;
}

int cmd_score(const ScoreArgs& a, std::ostream& out, std::ostream& err) {
  const ScoreConfig config{a.gamma};
  config.validate();
  const auto trace = load_trace(a.trace);
  warn_missing_layers(trace, err);
  const auto csv = scores_to_csv(score_layers(trace, config));
  if (a.out.empty()) {
    out << csv;
  } else {
    PendingOutputs files;
    files.add(a.out, csv);
    files.commit();
  }
  return kExitOk;
}

template <typename Fn>
auto in_stage(const char* stage, Fn&& fn) {
  try {
    return fn();
  } catch (const ValidationError& e) {
    throw ValidationError(std::string(stage) + ": " + e.what());
  } catch (const RuntimeError& e) {
    throw RuntimeError(std::string(stage) + ": " + e.what());
  }
}

int cmd_plan(const PlanArgs& a, std::ostream& out, std::ostream& err) {
  if (a.suite == !a.weights.empty()) throw ValidationError("plan: give exactly one of --weights or --suite");
  if (a.trace.empty() == a.scores.empty()) throw ValidationError("plan: give exactly one of --trace or --scores");
  const ScoreConfig config{a.gamma};
  config.validate();

  const auto registry = in_stage("registry", [&] { return load_registry(a.registry); });
  const auto uniform = in_stage("qos", [&] { return load_qos_matrix(a.qos, registry); });

  std::vector<ContributionScore> scores;
  std::string model = a.model;
  in_stage("score", [&] {
    if (!a.trace.empty()) {
      const auto trace = load_trace(a.trace);
      warn_missing_layers(trace, err);
      scores = score_layers(trace, config);
      if (model.empty()) model = trace.model_name;
    } else {
      scores = parse_scores_csv(read_file(a.scores));
    }
    return 0;
  });
  if (scores.empty()) throw ValidationError("score: no layers");
  std::vector<SublayerKind> kinds;
  for (const auto& s : scores) kinds.push_back(s.kind);
  const int num_layers = static_cast<int>(scores.size());

  std::vector<SuiteMember> members;
  if (a.suite) {
    members = suite_members(generate_weight_suite(a.compat_residual ? ResidualMode::kFixedTenth : ResidualMode::kEqualSplit));
    if (uniform.cols() != 3) throw ValidationError("plan: --suite needs exactly 3 metrics (memory, latency, accuracy)");
  } else {
    members.push_back({Category::kFairness, "plan", WeightVector::parse(a.weights)});
  }

  NamingScheme naming;
  naming.attention_pattern = a.attn_pattern;
  naming.ffn_pattern = a.ffn_pattern;
  naming.passthrough_type = a.passthrough_type;
  RankOptions options;
  options.workers = a.workers;

  const fs::path dir = resolve_out_dir(a.out_dir);
  PendingOutputs files;
  files.add(dir / "scores.csv", scores_to_csv(scores));
  PointSet estimated;
  for (const auto& m : registry.metrics) estimated.metric_names.push_back(m.name);

  for (const auto& member : members) {
    const auto selection = in_stage("rank", [&] { return select_best(num_layers, uniform, member.weights, options); });
    const auto allocation =
        in_stage("allocate", [&] { return allocate(scores, selection.best.composition, registry.types, member.weights); });
    const auto manifest = in_stage("manifest", [&] { return build_manifest(allocation, registry, kinds, naming, model); });

    const std::string suffix = a.suite ? "-" + member.label : "";
    files.add(dir / ("plan" + suffix + ".json"), plan_report_json(selection, uniform, member.weights));
    files.add(dir / ("manifest" + suffix + ".json"), manifest_to_json(manifest));
    estimated.points.push_back({member.label, selection.best.estimated, Provenance::kEstimated});

    out << member.label << ": composition " << join_counts(registry, selection.best.composition.counts)
        << " | estimated";
    for (std::size_t j = 0; j < registry.metrics.size(); ++j) {
      out << " " << registry.metrics[j].name << "=" << format_real(selection.best.estimated(static_cast<Eigen::Index>(j)));
    }
    out << " | score " << format_real(selection.best.ranking_score) << " | avg bits "
        << format_real(manifest.avg_effective_bits) << "\n";
  }
  if (a.suite) {
    files.add(dir / "suite.json",
              suite_to_json(generate_weight_suite(a.compat_residual ? ResidualMode::kFixedTenth : ResidualMode::kEqualSplit)));
    files.add(dir / "estimated_points.csv", points_to_csv(estimated));
  }
  if (a.dump_candidates > 0) files.add(dir / "candidates.csv", compositions_to_csv(num_layers, uniform, a.dump_candidates));
  files.commit();
  return kExitOk;
}

std::vector<Direction> eval_directions(const std::vector<std::string>& metric_names, const std::string& registry_path,
                                       const std::vector<std::string>& benefit) {
  std::vector<Direction> directions(metric_names.size(), Direction::kCost);
  if (!registry_path.empty()) {
    const auto registry = load_registry(registry_path);
    for (std::size_t j = 0; j < metric_names.size(); ++j) {
      const auto it = std::find_if(registry.metrics.begin(), registry.metrics.end(),
                                   [&](const MetricSpec& m) { return m.name == metric_names[j]; });
      if (it == registry.metrics.end()) throw ValidationError("metric '" + metric_names[j] + "' is not in the registry");
      directions[j] = it->direction;
    }
  }
  for (const auto& name : benefit) {
    const auto it = std::find(metric_names.begin(), metric_names.end(), name);
    if (it == metric_names.end()) throw ValidationError("--benefit: unknown metric '" + name + "'");
    directions[static_cast<std::size_t>(it - metric_names.begin())] = Direction::kBenefit;
  }
  return directions;
}

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  const auto baseline = load_points(a.baseline);
  const auto candidates = a.candidates.empty() ? baseline : load_points(a.candidates);
  if (baseline.metric_names != candidates.metric_names) {
    throw ValidationError("eval: baseline and candidate files have different metric columns");
  }
  const auto directions = eval_directions(baseline.metric_names, a.registry, a.benefit);
  const auto report = evaluate_sets(baseline, candidates, directions);

  const fs::path dir = resolve_out_dir(a.out_dir);
  PendingOutputs files;
  files.add(dir / "eval.json", eval_report_json(report));
  files.add(dir / "front.csv", front_to_csv(report));
  files.commit();

  out << "reference:";
  for (Eigen::Index j = 0; j < report.reference.size(); ++j) out << " " << format_real(report.reference(j));
  out << "\nbaseline   hv " << format_real(report.baseline_raw.hypervolume) << " (normalized "
      << format_real(report.baseline_normalized.hypervolume) << ")\n";
  out << "candidates hv " << format_real(report.candidate_raw.hypervolume) << " (normalized "
      << format_real(report.candidate_normalized.hypervolume) << ")\n";
  out << "hv gain " << format_real(report.gain_raw) << " (normalized " << format_real(report.gain_normalized) << ")\n";
  if (report.candidate_raw.clipped_points > 0) {
    out << "warning: " << report.candidate_raw.clipped_points << " candidate point(s) lie beyond the reference\n";
  }
  return kExitOk;
}

int cmd_suite(const SuiteArgs& a, std::ostream& out) {
  const auto suite = generate_weight_suite(a.compat_residual ? ResidualMode::kFixedTenth : ResidualMode::kEqualSplit);
  PendingOutputs files;
  if (a.report.empty()) {
    if (a.out.empty()) {
      out << suite_to_json(suite);
    } else {
      files.add(a.out, suite_to_json(suite));
    }
    files.commit();
    return kExitOk;
  }
  const auto results = load_points(a.report);
  PointSet baseline{results.metric_names, {}};
  if (!a.baseline.empty()) baseline = load_points(a.baseline);
  if (baseline.metric_names != results.metric_names) throw ValidationError("suite: baseline metric columns differ");
  const auto directions = eval_directions(results.metric_names, a.registry, {});
  std::map<std::string, SolutionPoint> by_label;
  for (const auto& p : results.points) {
    if (!by_label.emplace(p.label, p).second) throw ValidationError("suite: duplicate result label '" + p.label + "'");
  }
  const auto report = distance_to_best_report(suite, by_label, baseline.points, results.metric_names, directions);
  const auto csv = distance_report_to_csv(report);
  if (a.out.empty()) {
    out << csv;
  } else {
    files.add(a.out, csv);
  }
  files.commit();
  for (std::size_t j = 0; j < report.metric_names.size(); ++j) {
    out << "# best " << report.metric_names[j] << ": " << report.best_label[j] << " (" << report.best_category[j]
        << ")" << (report.best_in_dedicated_category[j] ? "" : " not in its dedicated category") << "\n";
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mixed-precision quantization planner"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "mpqplan 0.1.0");

  CountArgs count_args;
  auto* count = app.add_subcommand("count", "Count the candidate compositions of L layers over M types");
  count->add_option("-L,--layers", count_args.layers, "Number of layers")->required();
  count->add_option("-M,--types", count_args.types, "Number of quantization types")->required();
  count->add_flag("--enumerate", count_args.enumerate, "Also stream every composition and check the count");

  ScoreArgs score_args;
  auto* score = app.add_subcommand("score", "Reward-penalty contribution scores from a similarity trace");
  score->add_option("--trace", score_args.trace, "Trace file (JSON Lines)")->required();
  score->add_option("--gamma", score_args.gamma, "Similarity threshold in (0, 1]")->capture_default_str();
  score->add_option("-o,--out", score_args.out, "Write the CSV here instead of stdout");

  PlanArgs plan_args;
  auto* plan = app.add_subcommand("plan", "Select the best type distribution and allocate it to layers");
  plan->add_option("--registry", plan_args.registry, "Quantization type registry (JSON)")->required();
  plan->add_option("--qos", plan_args.qos, "Uniform QoS matrix (CSV)")->required();
  plan->add_option("--trace", plan_args.trace, "Similarity trace (JSON Lines)");
  plan->add_option("--scores", plan_args.scores, "Precomputed scores CSV instead of a trace");
  plan->add_option("--weights", plan_args.weights, "Metric weights, e.g. 0.7,0.15,0.15");
  plan->add_flag("--suite", plan_args.suite, "Plan every vector of the 28-member weight suite");
  plan->add_flag("--compat-residual", plan_args.compat_residual, "Suite skewed vectors use 0.1 residual weights");
  plan->add_option("--gamma", plan_args.gamma, "Similarity threshold in (0, 1]")->capture_default_str();
  plan->add_option("--out-dir", plan_args.out_dir, std::string("Output directory (default $") + kOutDirEnv + " or .)");
  plan->add_option("--dump-candidates", plan_args.dump_candidates, "Write the first N candidates to candidates.csv");
  plan->add_option("--workers", plan_args.workers, "Worker threads (0 = all cores)")->capture_default_str();
  plan->add_option("--model", plan_args.model, "Model name for the manifest (default: from the trace)");
  plan->add_option("--attn-pattern", plan_args.attn_pattern, "Tensor pattern for attention sublayers")->capture_default_str();
  plan->add_option("--ffn-pattern", plan_args.ffn_pattern, "Tensor pattern for feed-forward sublayers")->capture_default_str();
  plan->add_option("--passthrough-type", plan_args.passthrough_type,
                   "Type for embedding/output tensors (default: least aggressive)");

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "Hypervolume and gain of a candidate set against a uniform baseline");
  eval->add_option("--baseline", eval_args.baseline, "Baseline points CSV")->required();
  eval->add_option("--candidates", eval_args.candidates, "Candidate points CSV (default: the baseline itself)");
  eval->add_option("--registry", eval_args.registry, "Take metric directions from this registry");
  eval->add_option("--benefit", eval_args.benefit, "Metric(s) where larger is better");
  eval->add_option("--out-dir", eval_args.out_dir, std::string("Output directory (default $") + kOutDirEnv + " or .)");

  SuiteArgs suite_args;
  auto* suite = app.add_subcommand("suite", "Export the weight suite or build the distance-to-best report");
  suite->add_flag("--compat-residual", suite_args.compat_residual, "Skewed vectors use 0.1 residual weights");
  suite->add_option("-o,--out", suite_args.out, "Output file (default stdout)");
  suite->add_option("--report", suite_args.report, "Measured points CSV labelled by suite member");
  suite->add_option("--baseline", suite_args.baseline, "Uniform baseline points CSV for the report");
  suite->add_option("--registry", suite_args.registry, "Take metric directions from this registry");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*count) return cmd_count(count_args, out);
    if (*score) return cmd_score(score_args, out, err);
    if (*plan) return cmd_plan(plan_args, out, err);
    if (*eval) return cmd_eval(eval_args, out);
    if (*suite) return cmd_suite(suite_args, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitValidation;
}

}  // namespace mpqplan::cli
