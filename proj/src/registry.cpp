// Copyright 2026 The mpqplan Authors
// SPDX-License-Identifier: Apache-2.0

#include "mpqplan/registry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"
#include "mpqplan/error.hpp"
#include "mpqplan/io.hpp"

namespace mpqplan {

using nlohmann::json;

const char* to_string(Direction direction) {
  return direction == Direction::kCost ? "cost" : "benefit";
}

Direction direction_from_string(const std::string& text) {
  if (text == "cost") return Direction::kCost;
  if (text == "benefit") return Direction::kBenefit;
  throw ValidationError("unknown metric direction '" + text + "' (expected cost or benefit)");
}

std::vector<Direction> Registry::directions() const {
  std::vector<Direction> out;
  out.reserve(metrics.size());
  for (const auto& m : metrics) out.push_back(m.direction);
  return out;
}

std::size_t Registry::type_index(const std::string& name) const {
  for (std::size_t i = 0; i < types.size(); ++i) {
    if (types[i].name == name) return i;
  }
  throw ValidationError("unknown quantization type '" + name + "'");
}

Registry make_registry(std::vector<QuantType> types, std::vector<MetricSpec> metrics, bool ranks_given) {
  if (types.empty()) throw ValidationError("registry: no quantization types");
  if (metrics.empty()) throw ValidationError("registry: no metrics");

  std::set<std::string> names;
  for (const auto& t : types) {
    if (t.name.empty()) throw ValidationError("registry: type with empty name");
    if (!names.insert(t.name).second) throw ValidationError("registry: duplicate type name '" + t.name + "'");
    if (t.nominal_bits <= 0) throw ValidationError("registry: non-positive nominal_bits for '" + t.name + "'");
    if (!std::isfinite(t.effective_bits) || t.effective_bits < t.nominal_bits) {
      throw ValidationError("registry: effective_bits must be >= nominal_bits for '" + t.name + "'");
    }
  }
  std::set<std::string> metric_names;
  for (const auto& m : metrics) {
    if (m.name.empty()) throw ValidationError("registry: metric with empty name");
    if (!metric_names.insert(m.name).second) throw ValidationError("registry: duplicate metric name '" + m.name + "'");
  }

  const auto m = static_cast<int>(types.size());
  if (ranks_given) {
    std::vector<int> ranks;
    for (const auto& t : types) ranks.push_back(t.aggressiveness_rank);
    std::sort(ranks.begin(), ranks.end());
    for (int i = 0; i < m; ++i) {
      if (ranks[static_cast<std::size_t>(i)] != i + 1) {
        throw ValidationError("registry: ranks must be exactly 1.." + std::to_string(m));
      }
    }
  } else {
    std::vector<std::size_t> order(types.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (types[a].effective_bits != types[b].effective_bits) return types[a].effective_bits > types[b].effective_bits;
      return types[a].nominal_bits > types[b].nominal_bits;
    });
    for (int r = 0; r < m; ++r) types[order[static_cast<std::size_t>(r)]].aggressiveness_rank = r + 1;
  }
  std::sort(types.begin(), types.end(),
            [](const QuantType& a, const QuantType& b) { return a.aggressiveness_rank < b.aggressiveness_rank; });
  return Registry{std::move(types), std::move(metrics)};
}

Registry parse_registry(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("registry: parse error: ") + e.what());
  }
  try {
    std::vector<QuantType> types;
    std::size_t with_rank = 0;
    for (const auto& item : doc.at("types")) {
      QuantType t;
      t.name = item.at("name").get<std::string>();
      t.nominal_bits = item.at("nominal_bits").get<int>();
      t.effective_bits = item.at("effective_bits").get<double>();
      if (item.contains("rank") && !item.at("rank").is_null()) {
        t.aggressiveness_rank = item.at("rank").get<int>();
        ++with_rank;
      }
      types.push_back(std::move(t));
    }
    if (with_rank != 0 && with_rank != types.size()) {
      throw ValidationError("registry: rank given for some types but not all");
    }
    std::vector<MetricSpec> metrics;
    for (const auto& item : doc.at("metrics")) {
      MetricSpec spec;
      spec.name = item.at("name").get<std::string>();
      spec.unit = item.value("unit", std::string{});
      spec.direction = direction_from_string(item.value("direction", std::string{"cost"}));
      metrics.push_back(std::move(spec));
    }
    return make_registry(std::move(types), std::move(metrics), with_rank != 0);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("registry: ") + e.what());
  }
}

Registry load_registry(const std::filesystem::path& path) {
  try {
    return parse_registry(read_file(path));
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

std::string registry_to_json(const Registry& registry) {
  json doc;
  doc["types"] = json::array();
  for (const auto& t : registry.types) {
    doc["types"].push_back({{"name", t.name},
                            {"nominal_bits", t.nominal_bits},
                            {"effective_bits", t.effective_bits},
                            {"rank", t.aggressiveness_rank}});
  }
  doc["metrics"] = json::array();
  for (const auto& m : registry.metrics) {
    doc["metrics"].push_back({{"name", m.name}, {"unit", m.unit}, {"direction", to_string(m.direction)}});
  }
  return doc.dump(2) + "\n";
}

WeightVector::WeightVector(Eigen::VectorXd weights) : weights_(std::move(weights)) {
  if (weights_.size() == 0) throw ValidationError("weights: empty vector");
  bool any_positive = false;
  for (Eigen::Index j = 0; j < weights_.size(); ++j) {
    const double w = weights_(j);
    if (!std::isfinite(w) || w < 0.0 || w > 1.0) {
      throw ValidationError("weights: every entry must lie in [0, 1]");
    }
    any_positive = any_positive || w > 0.0;
  }
  if (!any_positive) throw ValidationError("weights: at least one entry must be positive");
}

WeightVector::WeightVector(std::initializer_list<double> weights)
    : WeightVector(Eigen::Map<const Eigen::VectorXd>(weights.begin(), static_cast<Eigen::Index>(weights.size()))) {}

WeightVector WeightVector::parse(const std::string& text) {
  const auto fields = split_csv_line(text);
  Eigen::VectorXd w(static_cast<Eigen::Index>(fields.size()));
  for (std::size_t j = 0; j < fields.size(); ++j) w(static_cast<Eigen::Index>(j)) = parse_real(fields[j]);
  return WeightVector(std::move(w));
}

void UniformQoSMatrix::validate() const {
  if (values.rows() != static_cast<Eigen::Index>(registry.types.size()) ||
      values.cols() != static_cast<Eigen::Index>(registry.metrics.size())) {
    throw ValidationError("qos matrix: shape does not match the registry");
  }
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      const double v = values(i, j);
      const auto& type = registry.types[static_cast<std::size_t>(i)].name;
      const auto& metric = registry.metrics[static_cast<std::size_t>(j)];
      if (!std::isfinite(v)) throw ValidationError("qos matrix: non-finite value for " + type + "/" + metric.name);
      if (metric.direction == Direction::kCost && v <= 0.0) {
        throw ValidationError("qos matrix: invalid value " + format_real(v) + " for " + type + "/" + metric.name +
                              " (cost metrics must be strictly positive)");
      }
      if (metric.direction == Direction::kBenefit && v < 0.0) {
        throw ValidationError("qos matrix: negative benefit value for " + type + "/" + metric.name);
      }
    }
  }
}

UniformQoSMatrix parse_qos_matrix(const std::string& csv_text, const Registry& registry) {
  std::istringstream in(csv_text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<int> column_of_metric(registry.metrics.size(), -1);
  bool have_header = false;

  UniformQoSMatrix out;
  out.registry = registry;
  out.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(registry.types.size()),
                                     static_cast<Eigen::Index>(registry.metrics.size()));
  std::vector<bool> seen(registry.types.size(), false);

  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    const auto fields = split_csv_line(line);
    const auto where = "qos matrix line " + std::to_string(line_no) + ": ";
    if (!have_header) {
      if (fields.empty() || fields[0] != "type") throw ValidationError(where + "header must start with 'type'");
      for (std::size_t c = 1; c < fields.size(); ++c) {
        bool matched = false;
        for (std::size_t j = 0; j < registry.metrics.size(); ++j) {
          if (registry.metrics[j].name == fields[c]) {
            if (column_of_metric[j] != -1) throw ValidationError(where + "duplicate column '" + fields[c] + "'");
            column_of_metric[j] = static_cast<int>(c);
            matched = true;
          }
        }
        if (!matched) throw ValidationError(where + "unknown metric column '" + fields[c] + "'");
      }
      for (std::size_t j = 0; j < registry.metrics.size(); ++j) {
        if (column_of_metric[j] == -1) throw ValidationError(where + "missing metric column '" + registry.metrics[j].name + "'");
      }
      have_header = true;
      continue;
    }
    if (fields.size() != registry.metrics.size() + 1) throw ValidationError(where + "wrong number of fields");
    std::size_t row = 0;
    try {
      row = registry.type_index(fields[0]);
    } catch (const ValidationError&) {
      throw ValidationError(where + "unknown type '" + fields[0] + "'");
    }
    if (seen[row]) throw ValidationError(where + "duplicate row for type '" + fields[0] + "'");
    seen[row] = true;
    for (std::size_t j = 0; j < registry.metrics.size(); ++j) {
      try {
        out.values(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(j)) =
            parse_real(fields[static_cast<std::size_t>(column_of_metric[j])]);
      } catch (const ValidationError& e) {
        throw ValidationError(where + e.what());
      }
    }
  }
  if (!have_header) throw ValidationError("qos matrix: empty file");
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i]) throw ValidationError("qos matrix: missing row for type '" + registry.types[i].name + "'");
  }
  out.validate();
  return out;
}

UniformQoSMatrix load_qos_matrix(const std::filesystem::path& path, const Registry& registry) {
  try {
    return parse_qos_matrix(read_file(path), registry);
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

std::string qos_matrix_to_csv(const UniformQoSMatrix& matrix) {
  std::string out = "type";
  for (const auto& m : matrix.registry.metrics) out += "," + m.name;
  out += "\n";
  for (std::size_t i = 0; i < matrix.rows(); ++i) {
    out += matrix.registry.types[i].name;
    for (std::size_t j = 0; j < matrix.cols(); ++j) {
      out += "," + format_real(matrix.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }
    out += "\n";
  }
  return out;
}

}  // namespace mpqplan
