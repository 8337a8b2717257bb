// Copyright 2026 The mpqplan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <filesystem>
#include <initializer_list>
#include <string>
#include <vector>

namespace mpqplan {

/// One uniform quantization level. Rank 1 is the least aggressive (highest precision) type.
struct QuantType {
  std::string name;
  int nominal_bits = 0;
  double effective_bits = 0.0;
  int aggressiveness_rank = 0;

  bool operator==(const QuantType&) const = default;
};

enum class Direction { kCost, kBenefit };

const char* to_string(Direction direction);
Direction direction_from_string(const std::string& text);

struct MetricSpec {
  std::string name;
  std::string unit;
  Direction direction = Direction::kCost;

  bool operator==(const MetricSpec&) const = default;
};

/// Types sorted by aggressiveness_rank ascending, plus the metric columns.
struct Registry {
  std::vector<QuantType> types;
  std::vector<MetricSpec> metrics;

  std::size_t num_types() const { return types.size(); }
  std::size_t num_metrics() const { return metrics.size(); }
  std::vector<Direction> directions() const;

  /// Index of the type called `name`; throws ValidationError if unknown.
  std::size_t type_index(const std::string& name) const;

  bool operator==(const Registry&) const = default;
};

/// Measured QoS of every uniform type: values(i, j) is metric j of type i.
/// Rows follow registry.types, columns follow registry.metrics.
struct UniformQoSMatrix {
  Registry registry;
  Eigen::MatrixXd values;

  std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(values.cols()); }

  /// Re-checks every invariant (shape, finiteness, cost positivity).
  void validate() const;
};

/// Per-metric priorities. Entries lie in [0, 1] with at least one positive;
/// they are used as given and never renormalized.
class WeightVector {
 public:
  WeightVector() = default;
  explicit WeightVector(Eigen::VectorXd weights);
  WeightVector(std::initializer_list<double> weights);

  const Eigen::VectorXd& values() const { return weights_; }
  std::size_t size() const { return static_cast<std::size_t>(weights_.size()); }
  double operator[](std::size_t j) const { return weights_(static_cast<Eigen::Index>(j)); }

  /// Parses "0.7,0.15,0.15".
  static WeightVector parse(const std::string& text);

  bool operator==(const WeightVector& other) const { return weights_ == other.weights_; }

 private:
  Eigen::VectorXd weights_;
};

/// Checks QuantType/MetricSpec invariants and normalizes ranks; used by the loaders
/// and available for registries assembled in code.
///
/// When no type carries a rank, ranks are derived from effective_bits descending
/// (ties: nominal_bits descending, then input order). Explicit ranks must be given
/// for all types and form 1..M.
Registry make_registry(std::vector<QuantType> types, std::vector<MetricSpec> metrics,
                       bool ranks_given);

Registry parse_registry(const std::string& json_text);
Registry load_registry(const std::filesystem::path& path);
std::string registry_to_json(const Registry& registry);

UniformQoSMatrix parse_qos_matrix(const std::string& csv_text, const Registry& registry);
UniformQoSMatrix load_qos_matrix(const std::filesystem::path& path, const Registry& registry);
std::string qos_matrix_to_csv(const UniformQoSMatrix& matrix);

}  // namespace mpqplan
