// Copyright 2026 The mpqplan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mpqplan/composition.hpp"
#include "mpqplan/registry.hpp"

namespace mpqplan {

/// Per-metric statistics of the estimated QoS over the whole candidate stream.
struct ColumnStats {
  Eigen::VectorXd sum_of_squares;
  Eigen::VectorXd min;
  Eigen::VectorXd max;
  std::uint64_t candidates = 0;

  explicit ColumnStats(std::size_t metrics = 0);

  Eigen::VectorXd norms() const { return sum_of_squares.cwiseSqrt(); }
  void add(std::span<const double> x);
  /// Appends the statistics of a later range of the stream.
  void merge(const ColumnStats& later);
};

/// Ideal (a*) and negative-ideal (a-) points in weighted normalized space.
struct IdealPair {
  Eigen::VectorXd ideal;
  Eigen::VectorXd negative_ideal;
};

struct RankedCandidate {
  Composition composition;
  Eigen::VectorXd estimated;
  Eigen::VectorXd weighted;
  double ranking_score = 0.0;
};

/// Euclidean column normalization; an all-zero column maps to zero.
template <typename Scalar>
Scalar normalize(Scalar value, Scalar column_norm) {
  return column_norm == Scalar(0) ? Scalar(0) : value / column_norm;
}

/// Relative closeness d- / (d- + d+). Returns 0.5 when both distances vanish.
template <typename DerivedA, typename DerivedB, typename DerivedC>
typename DerivedA::Scalar ranking_score(const Eigen::MatrixBase<DerivedA>& weighted,
                                        const Eigen::MatrixBase<DerivedB>& ideal,
                                        const Eigen::MatrixBase<DerivedC>& negative_ideal) {
  using Scalar = typename DerivedA::Scalar;
  Scalar to_worst = 0, to_best = 0;
  for (Eigen::Index j = 0; j < weighted.size(); ++j) {
    const Scalar dw = weighted(j) - negative_ideal(j);
    const Scalar db = weighted(j) - ideal(j);
    to_worst += dw * dw;
    to_best += db * db;
  }
  to_worst = std::sqrt(to_worst);
  to_best = std::sqrt(to_best);
  const Scalar total = to_worst + to_best;
  return total == Scalar(0) ? Scalar(0.5) : to_worst / total;
}

/// Ideal points from column extremes: for a cost metric a*_j is the weighted
/// normalized column minimum and a-_j the maximum; reversed for benefit metrics.
IdealPair ideal_pair(const ColumnStats& stats, const Eigen::VectorXd& weights,
                     const std::vector<Direction>& directions);

/// Weighted normalized vector a_j = normalize(x_j, norm_j) * w_j.
Eigen::VectorXd weigh(const Eigen::VectorXd& estimated, const Eigen::VectorXd& norms,
                      const Eigen::VectorXd& weights);

struct RankOptions {
  /// 0 means std::thread::hardware_concurrency().
  unsigned workers = 1;
  /// rank_all refuses candidate spaces larger than this.
  std::uint64_t materialization_cap = 1'000'000;
};

struct Selection {
  RankedCandidate best;
  ColumnStats stats;
  IdealPair ideals;
};

/// Two passes over the lexicographic candidate stream: column statistics, then
/// scores. Keeps the highest score; ties go to the smallest composition index.
/// Work is split into fixed-size index chunks merged in chunk order, so the result
/// is bit-identical for any worker count.
Selection select_best(int num_layers, const UniformQoSMatrix& uniform, const WeightVector& weights,
                      const RankOptions& options = {});

/// Pass 1 only.
ColumnStats collect_column_stats(int num_layers, const UniformQoSMatrix& uniform,
                                 const RankOptions& options = {});

/// Every candidate, sorted by score descending then index ascending.
std::vector<RankedCandidate> rank_all(int num_layers, const UniformQoSMatrix& uniform,
                                      const WeightVector& weights, const RankOptions& options = {});

/// JSON plan report: weights, best_composition, estimated_qos, ranking_score, column_stats.
std::string plan_report_json(const Selection& selection, const UniformQoSMatrix& uniform,
                             const WeightVector& weights);

}  // namespace mpqplan
