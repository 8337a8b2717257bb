// Copyright 2026 The mpqplan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "mpqplan/registry.hpp"

namespace mpqplan {

enum class Provenance { kMeasured, kEstimated };

const char* to_string(Provenance provenance);
Provenance provenance_from_string(const std::string& text);

struct SolutionPoint {
  std::string label;
  Eigen::VectorXd values;
  Provenance provenance = Provenance::kMeasured;
};

/// p is no worse than q everywhere and strictly better somewhere.
bool dominates(const Eigen::VectorXd& p, const Eigen::VectorXd& q, const std::vector<Direction>& directions);
bool dominates(const SolutionPoint& p, const SolutionPoint& q, const std::vector<Direction>& directions);

/// Non-dominated subset in input order; repeated points are kept once.
std::vector<SolutionPoint> pareto_filter(const std::vector<SolutionPoint>& points,
                                         const std::vector<Direction>& directions);

struct HVResult {
  double hypervolume = 0.0;
  Eigen::VectorXd reference;
  /// Points strictly better than the reference in every coordinate.
  std::size_t contributing_points = 0;
  /// Points worse than the reference in at least one coordinate (left out).
  std::size_t clipped_points = 0;
};

/// Exact dominated hypervolume for J <= 3 (throws ValidationError beyond).
HVResult hypervolume(const std::vector<SolutionPoint>& points, const Eigen::VectorXd& reference,
                     const std::vector<Direction>& directions);

/// Same, after dividing every coordinate (and the reference) by the reference value,
/// so the reference becomes the all-ones point. Requires a strictly positive reference.
HVResult normalized_hypervolume(const std::vector<SolutionPoint>& points, const Eigen::VectorXd& reference,
                                const std::vector<Direction>& directions);

/// Minimization kernel on raw rows (each row a point, already inside the reference box).
double hypervolume_min(const Eigen::MatrixXd& points, const Eigen::VectorXd& reference);

/// (candidate - baseline) / baseline.
double hv_gain(double hv_candidate, double hv_baseline);

/// Componentwise worst baseline value.
Eigen::VectorXd reference_from_baseline(const std::vector<SolutionPoint>& baseline,
                                        const std::vector<Direction>& directions);

struct PointSet {
  std::vector<std::string> metric_names;
  std::vector<SolutionPoint> points;
};

/// CSV `label,provenance,<metric1>,...`.
PointSet parse_points_csv(const std::string& csv_text);
PointSet load_points(const std::filesystem::path& path);
std::string points_to_csv(const PointSet& set);

struct EvalReport {
  std::vector<std::string> metric_names;
  Eigen::VectorXd reference;
  HVResult baseline_raw, candidate_raw;
  HVResult baseline_normalized, candidate_normalized;
  double gain_raw = 0.0;
  double gain_normalized = 0.0;
  /// Front membership within the union, baseline points first.
  std::vector<std::pair<SolutionPoint, bool>> membership;
  std::size_t baseline_count = 0;
};

/// Reference from the baseline's worst values, HV of both sets, gain, and Pareto
/// membership over the union. Throws ValidationError on mismatched metric columns.
EvalReport evaluate_sets(const PointSet& baseline, const PointSet& candidates,
                         const std::vector<Direction>& directions);

std::string eval_report_json(const EvalReport& report);
std::string front_to_csv(const EvalReport& report);

}  // namespace mpqplan
