// Copyright 2026 The mpqplan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>
#include <vector>

#include "mpqplan/pareto.hpp"
#include "mpqplan/registry.hpp"

namespace mpqplan {

/// Metric order of the suite: (memory, latency, accuracy).
enum class Category { kFairness, kMemory, kLatency, kAccuracy };

const char* to_string(Category category);

/// How the two non-prioritized metrics share the residual of a skewed vector.
enum class ResidualMode {
  /// (0.7, 0.15, 0.15), (0.8, 0.1, 0.1), (0.9, 0.05, 0.05).
  kEqualSplit,
  /// 0.1 on each of the other two metrics: (0.7, 0.1, 0.1), (0.8, 0.1, 0.1), (0.9, 0.1, 0.1).
  kFixedTenth,
};

struct SuiteMember {
  Category category = Category::kFairness;
  std::string label;
  WeightVector weights;
};

struct WeightCategory {
  Category name = Category::kFairness;
  std::vector<SuiteMember> members;
};

/// 4 fairness vectors and 8 per prioritized metric (3 skewed, 1 dominant,
/// 2 pairwise at 0.75, 2 pairwise at 0.9): 28 in total, deterministic order.
std::vector<WeightCategory> generate_weight_suite(ResidualMode mode = ResidualMode::kEqualSplit);

/// Flattened suite in category order.
std::vector<SuiteMember> suite_members(const std::vector<WeightCategory>& suite);

/// JSON list of {category, label, weights}.
std::string suite_to_json(const std::vector<WeightCategory>& suite);

struct CategoryDistance {
  std::string row;  // category name, or "Uniform" for the baseline row
  Eigen::VectorXd mean_distance;
};

struct DistanceReport {
  std::vector<std::string> metric_names;
  /// Best value of each metric over every evaluated model (suite and baseline).
  Eigen::VectorXd best;
  std::vector<std::string> best_label;
  std::vector<std::string> best_category;
  /// Whether metric j's best model belongs to the category prioritizing j.
  std::vector<bool> best_in_dedicated_category;
  std::vector<CategoryDistance> rows;
};

/// Category-average distance to the best value of each metric (lower is better).
/// `results` maps suite labels to measured points and must cover every member.
DistanceReport distance_to_best_report(const std::vector<WeightCategory>& suite,
                                       const std::map<std::string, SolutionPoint>& results,
                                       const std::vector<SolutionPoint>& baseline,
                                       const std::vector<std::string>& metric_names,
                                       const std::vector<Direction>& directions);

/// CSV `category,<metric1>,...` with one row per category (and the baseline row).
std::string distance_report_to_csv(const DistanceReport& report);

}  // namespace mpqplan
